#include "edsense/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "edsense/error.hpp"

namespace edsense::integrate {

namespace {

// Kronrod 15-point abscissae (non-negative half) and weights; the Gauss
// 7-point rule uses every other abscissa.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  return {a, b, value, error};
}

}  // namespace

Result adaptive(const std::function<double(double)>& f, std::span<const double> breakpoints,
                const Tolerance& tol) {
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    Segment s = gk15(f, breakpoints[i], breakpoints[i + 1]);
    total += s.value;
    total_error += s.error;
    heap.push(s);
  }
  int subdivisions = static_cast<int>(heap.size());
  auto satisfied = [&] {
    return total_error <= std::max(tol.absolute, tol.relative * std::abs(total));
  };
  while (!heap.empty() && !satisfied() && subdivisions < tol.max_subdivisions) {
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval can no longer be split in double precision.
      heap.push(worst);
      break;
    }
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Resum to shed the drift of the running updates.
  double value = 0.0;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  Result r;
  r.value = value;
  r.error = error;
  r.subdivisions = subdivisions;
  r.converged = error <= std::max(tol.absolute, tol.relative * std::abs(value));
  return r;
}

Result adaptive(const std::function<double(double)>& f, double a, double b,
                const Tolerance& tol) {
  const std::array<double, 2> bp{a, b};
  return adaptive(f, bp, tol);
}

double adaptive_or_throw(const std::function<double(double)>& f,
                         std::span<const double> breakpoints, const Tolerance& tol,
                         const char* what) {
  const Result r = adaptive(f, breakpoints, tol);
  if (!r.converged) {
    throw ConvergenceError(std::string(what) + ": adaptive quadrature did not converge (estimate " +
                           std::to_string(r.value) + ", error " + std::to_string(r.error) +
                           ")");
  }
  return r.value;
}

}  // namespace edsense::integrate
