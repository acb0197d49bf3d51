#include <doctest.h>

#include <cmath>

#include "nprace/ad/dual.hpp"
#include "support.hpp"

using namespace nprace;

namespace {

template <typename T>
T f2(const T& x, const T& y) {
  using std::atan2, std::exp, std::sin, std::sqrt;
  return sin(x) * y * y + exp(x * y) / (1.0 + x * x) + atan2(y, x + 2.0) * sqrt(1.0 + y * y);
}

}  // namespace

TEST_CASE("dual numbers reproduce analytic first derivatives") {
  using D = ad::Dual<double, 2>;
  const double x = 0.7, y = -0.4;
  const D dx = ad::seed<D>(x, 0), dy = ad::seed<D>(y, 1);
  const D r = f2(dx, dy);
  CHECK(r.v == doctest::Approx(f2(x, y)).epsilon(1e-15));
  const double gx = testing::central_diff([&](double t) { return f2(t, y); }, x, 1e-6);
  const double gy = testing::central_diff([&](double t) { return f2(x, t); }, y, 1e-6);
  CHECK(r.d[0] == doctest::Approx(gx).epsilon(1e-8));
  CHECK(r.d[1] == doctest::Approx(gy).epsilon(1e-8));
}

TEST_CASE("elementary functions match closed-form derivatives") {
  using D = ad::Dual<double, 1>;
  const double x = 0.3;
  const D d = ad::seed<D>(x, 0);
  CHECK(ad::asin(d).d[0] == doctest::Approx(1.0 / std::sqrt(1 - x * x)));
  CHECK(ad::acos(d).d[0] == doctest::Approx(-1.0 / std::sqrt(1 - x * x)));
  CHECK(ad::atan(d).d[0] == doctest::Approx(1.0 / (1 + x * x)));
  CHECK(ad::tan(d).d[0] == doctest::Approx(1.0 / (std::cos(x) * std::cos(x))));
  CHECK(ad::log(d).d[0] == doctest::Approx(1.0 / x));
  CHECK((1.0 / d).d[0] == doctest::Approx(-1.0 / (x * x)));
}

TEST_CASE("second-order numbers give the Hessian of a two-variable function") {
  using S = ad::Second<2>;
  const double x = 0.7, y = -0.4, h = 1e-4;
  const S r = f2(ad::seed<S>(x, 0), ad::seed<S>(y, 1));
  using D = ad::Dual<double, 2>;
  auto grad = [&](double a, double b) { return f2(ad::seed<D>(a, 0), ad::seed<D>(b, 1)); };
  // Central differences of the exact gradient.
  const double hxx = (grad(x + h, y).d[0] - grad(x - h, y).d[0]) / (2 * h);
  const double hxy = (grad(x, y + h).d[0] - grad(x, y - h).d[0]) / (2 * h);
  const double hyy = (grad(x, y + h).d[1] - grad(x, y - h).d[1]) / (2 * h);
  CHECK(r.hessian(0, 0) == doctest::Approx(hxx).epsilon(1e-7));
  CHECK(r.hessian(1, 0) == doctest::Approx(hxy).epsilon(1e-7));
  CHECK(r.hessian(0, 1) == doctest::Approx(hxy).epsilon(1e-7));
  CHECK(r.hessian(1, 1) == doctest::Approx(hyy).epsilon(1e-7));
  CHECK(r.g[0] == doctest::Approx(grad(x, y).d[0]).epsilon(1e-14));
}

TEST_CASE("nested duals carry time derivatives through products") {
  using D1 = ad::Dual<double, 1>;
  using D2 = ad::Dual<D1, 1>;
  // q(t) = sin(t)^3; check q'' at t = 0.4 via nesting.
  const double t = 0.4;
  D2 q(D1(std::sin(t)));
  q.v.d[0] = std::cos(t);
  q.d[0] = D1(std::cos(t));
  q.d[0].d[0] = -std::sin(t);
  const D2 c = q * q * q;
  const double exact = 6 * std::sin(t) * std::cos(t) * std::cos(t) - 3 * std::pow(std::sin(t), 3);
  CHECK(c.d[0].d[0] == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("index packing of the lower triangle is symmetric") {
  using S = ad::Second<5>;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) CHECK(S::index(i, j) == S::index(j, i));
  }
  CHECK(S::index(4, 4) == S::kPacked - 1);
}
