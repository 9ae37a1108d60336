#pragma once

#include <string>
#include <vector>

#include "fairtext/nn/tape.hpp"

namespace fairtext::nn {

// Binding mode for a model's parameters on a tape. Frozen parameters still
// pass gradients through to their inputs but never receive any themselves.
enum class Bind { Trainable, Frozen };

inline Var bind(Tape& tape, Parameter& p, Bind mode) {
  return mode == Bind::Trainable ? tape.param(p) : tape.frozen(p);
}

// Gated recurrent unit:
//   r = sigmoid(Wr x + Ur h + br)
//   z = sigmoid(Wz x + Uz h + bz)
//   n = tanh(Wn x + r .* (Un h) + bn)
//   h' = (1 - z) .* n + z .* h
struct GruParams {
  Parameter Wr, Ur, br;
  Parameter Wz, Uz, bz;
  Parameter Wn, Un, bn;

  GruParams() = default;
  GruParams(const std::string& prefix, int input_dim, int hidden_dim, Rng& rng);

  std::vector<Parameter*> params();
};

struct GruVars {
  Var Wr, Ur, br, Wz, Uz, bz, Wn, Un, bn;
};

GruVars bind_gru(Tape& tape, GruParams& p, Bind mode);

Var gru_step(Tape& tape, const GruVars& g, Var x, Var h_prev);

// Unrolls the GRU over a padded batch. Steps at or past an example's length
// carry the hidden state unchanged, so the result at any position t is the
// state after that example's first min(t+1, length) real tokens.
// Returns the per-position states; back() is the last-real-token state.
std::vector<Var> gru_sequence(Tape& tape, const GruVars& g,
                              const std::vector<Var>& inputs,
                              const std::vector<int>& lengths, int hidden_dim,
                              bool reverse_direction = false);

}  // namespace fairtext::nn
