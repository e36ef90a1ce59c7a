#include "edgelab/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>

namespace edgelab::quad {

namespace {

struct Table {
  std::array<double, 20> nodes{};
  std::array<double, 20> weights{};
  Table() {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes[k] = x[i];
      weights[k++] = w[i];
      nodes[k] = -x[i];
      weights[k++] = w[i];
    }
  }
};

const Table& table() {
  static const Table t;
  return t;
}

}  // namespace

std::span<const double> gl_nodes() { return table().nodes; }
std::span<const double> gl_weights() { return table().weights; }

}  // namespace edgelab::quad
