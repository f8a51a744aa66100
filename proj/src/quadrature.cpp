#include "replisum/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <sstream>
#include <vector>

#include "replisum/error.hpp"

namespace replisum {

namespace {
boost::math::quadrature::tanh_sinh<double>& integrator() {
  static boost::math::quadrature::tanh_sinh<double> instance;
  return instance;
}
}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol, std::span<const double> breakpoints) {
  if (!(hi >= lo)) throw DomainError("integrate: empty or reversed interval");
  std::vector<double> nodes{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) nodes.push_back(b);
  std::sort(nodes.begin() + 1, nodes.end());
  nodes.push_back(hi);

  QuadratureResult total{0.0, 0.0};
  const double piece_tol = abs_tol / static_cast<double>(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] <= nodes[i]) continue;
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator().integrate([&f](double x) { return f(x); }, nodes[i], nodes[i + 1], piece_tol, &err, &l1);
    if (!(err <= piece_tol)) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << nodes[i] << ", " << nodes[i + 1]
          << "]: error estimate " << err << " > tolerance " << piece_tol << " (L1 " << l1 << ")";
      throw NumericalError(msg.str());
    }
    total.value += v;
    total.error += err;
  }
  return total;
}

}  // namespace replisum
