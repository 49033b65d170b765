#pragma once

// OpenMP loops over independent samples, with serial twins used as
// references in tests. Results do not depend on the thread count: reductions
// break ties by the lowest index, and an exception thrown by any iteration is
// rethrown for the lowest failing index after the loop.

#include <omp.h>

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

namespace lhdeform::par {

/// Largest residual and the first index attaining it. NaN counts as +inf.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;

  void offer(double v, std::size_t i) {
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (v > value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
  void merge(const Worst& o) { offer(o.value, o.index); }
};

namespace detail {

struct FirstError {
  std::exception_ptr error;
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void record(std::size_t i) {
#pragma omp critical(lhdeform_first_error)
    if (i < index) {
      index = i;
      error = std::current_exception();
    }
  }
  void rethrow() const {
    if (error) std::rethrow_exception(error);
  }
};

}  // namespace detail

namespace serial {

template <class F>
Worst worst(std::size_t n, F&& f) {
  Worst w;
  for (std::size_t i = 0; i < n; ++i) w.offer(f(i), i);
  return w;
}

template <class P>
std::size_t count_if(std::size_t n, P&& pred) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += pred(i) ? 1 : 0;
  return c;
}

template <class T, class F>
std::vector<T> map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

template <class F>
void for_each(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace serial

template <class F>
Worst worst(std::size_t n, F&& f) {
  Worst total;
  detail::FirstError err;
  const long m = static_cast<long>(n);
#pragma omp parallel
  {
    Worst local;
#pragma omp for schedule(static)
    for (long i = 0; i < m; ++i) {
      try {
        local.offer(f(static_cast<std::size_t>(i)), static_cast<std::size_t>(i));
      } catch (...) {
        err.record(static_cast<std::size_t>(i));
      }
    }
#pragma omp critical(lhdeform_worst)
    total.merge(local);
  }
  err.rethrow();
  return total;
}

template <class P>
std::size_t count_if(std::size_t n, P&& pred) {
  long c = 0;
  detail::FirstError err;
  const long m = static_cast<long>(n);
#pragma omp parallel for schedule(static) reduction(+ : c)
  for (long i = 0; i < m; ++i) {
    try {
      c += pred(static_cast<std::size_t>(i)) ? 1 : 0;
    } catch (...) {
      err.record(static_cast<std::size_t>(i));
    }
  }
  err.rethrow();
  return static_cast<std::size_t>(c);
}

template <class T, class F>
std::vector<T> map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  detail::FirstError err;
  const long m = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      err.record(static_cast<std::size_t>(i));
    }
  }
  err.rethrow();
  return out;
}

template <class F>
void for_each(std::size_t n, F&& f) {
  detail::FirstError err;
  const long m = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      err.record(static_cast<std::size_t>(i));
    }
  }
  err.rethrow();
}

}  // namespace lhdeform::par
