#include "spn/common.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

namespace spn {

namespace {

double simpson_rule(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_rule(a, fa, m, fm, flm);
  const double right = simpson_rule(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0) fail(Err::QuadratureFailure, "adaptive quadrature depth exhausted");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (!(tol > 0)) fail(Err::QuadratureFailure, "quadrature tolerance must be positive");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_rule(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::int64_t panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double odd = 0, even = 0;
  for (std::int64_t i = 1; i < panels; i += 2) odd += f(a + h * static_cast<double>(i));
  for (std::int64_t i = 2; i < panels; i += 2) even += f(a + h * static_cast<double>(i));
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

HermiteTable::HermiteTable(double lo, double hi, std::vector<double> values,
                           std::vector<double> derivs)
    : lo_(lo), hi_(hi), v_(std::move(values)), d_(std::move(derivs)) {
  if (v_.size() < 2 || v_.size() != d_.size())
    fail(Err::InvalidParams, "hermite table needs >= 2 knots with matching derivatives");
  dx_ = (hi_ - lo_) / static_cast<double>(v_.size() - 1);
}

double HermiteTable::operator()(double x) const {
  const auto n = static_cast<std::ptrdiff_t>(v_.size());
  double u = (x - lo_) / dx_;
  auto i = static_cast<std::ptrdiff_t>(u);
  i = std::clamp<std::ptrdiff_t>(i, 0, n - 2);
  const double s = u - static_cast<double>(i);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * v_[i] + h10 * dx_ * d_[i] + h01 * v_[i + 1] + h11 * dx_ * d_[i + 1];
}

namespace {
std::atomic<int> g_threads{0};  // 0 = hardware concurrency
}

int default_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void set_default_threads(int n) { g_threads.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int nthreads) {
  if (n == 0) return;
  if (nthreads <= 0) nthreads = default_threads();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spn
