#pragma once

// Per-layer tables for walking the transfer recursion backwards (sampling
// and ground-state reconstruction).

#include <vector>

#include "detail/transfer_engine.hpp"

namespace dimerlab::detail {

template <class R>
struct LayerTables {
  int first = 0;
  int h = 0;
  std::vector<LayerView> layers;
  std::vector<std::vector<typename R::Value>> local;    // per layer
  std::vector<std::vector<double>> hw_in;               // horizontal sums from layer i - 1 into i
  std::vector<Mask> prev_allowed;                        // fibers reservable from layer i - 1
  std::vector<std::vector<typename R::Value>> history;  // state after layer i
  typename R::Value total;

  explicit LayerTables(const LayeredInstance& inst) : first(inst.first()), h(inst.h()) {
    const std::size_t size = std::size_t{1} << h;
    total = run_layers<R>(inst, &history)[0];
    for (int i = inst.first(); i <= inst.last(); ++i) {
      layers.push_back(inst.layer(i));
      local.push_back(local_table<R>(layers.back(), h, inst.tilt()));
      if (i == inst.first()) {
        hw_in.emplace_back(size, 0.0);
        prev_allowed.push_back(0);
      } else {
        hw_in.push_back(inst.horizontal_sums(i - 1));
        prev_allowed.push_back(inst.forward_allowed(i - 1));
      }
    }
  }

  /// State value after layer i - 1 (the identity before the first layer).
  typename R::Value before(int idx, Mask s) const {
    if (idx == 0) return s == 0 ? R::one() : R::zero();
    return history[idx - 1][s];
  }
};

}  // namespace dimerlab::detail
