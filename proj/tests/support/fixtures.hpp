#pragma once

#include "coopinit/datasets.hpp"
#include "coopinit/ebm.hpp"
#include "coopinit/nn.hpp"

namespace coopinit::test {

// Random tanh descriptor whose Gibbs measure is contained in a finite
// grid: two hidden units are pinned to carve a ~24-nat plateau well over
// (-5, 5) so exp(score) decays far below the peak at the grid edges; the
// remaining units keep their random initialization and put an irregular
// ripple on top of the plateau. Satisfies the enumeration oracle's
// boundary-mass precondition for any seed.
inline Descriptor contained_random_descriptor(std::uint64_t seed,
                                              int hidden = 16) {
  MlpConfig cfg;
  cfg.input_dim = 1;
  cfg.hidden_dims = {hidden};
  cfg.output_dim = 1;
  cfg.activation = Activation::kTanh;
  cfg.seed = seed;
  Mlp net(cfg);
  auto w0 = net.weight(0);
  auto b0 = net.bias(0);
  auto w1 = net.weight(1);
  w0(0, 0) = 3.0;
  b0[0] = -15.0;  // tanh(3 (x - 5))
  w0(1, 0) = 3.0;
  b0[1] = 15.0;  // tanh(3 (x + 5))
  w1(0, 0) = -12.0;
  w1(0, 1) = 12.0;
  return Descriptor(std::move(net));
}

// Grid and 1D dataset used by the enumeration-oracle suites.
inline Grid1d oracle_grid(int bins) { return Grid1d{-8.0, 8.0, bins}; }

inline DatasetSpec oracle_line_dataset() {
  return DatasetSpec::line_1d(3, 2.0, 0.3);
}

}  // namespace coopinit::test
