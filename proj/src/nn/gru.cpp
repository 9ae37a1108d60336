#include "fairtext/nn/gru.hpp"

namespace fairtext::nn {

GruParams::GruParams(const std::string& prefix, int input_dim, int hidden_dim,
                     Rng& rng)
    : Wr(prefix + ".Wr", hidden_dim, input_dim),
      Ur(prefix + ".Ur", hidden_dim, hidden_dim),
      br(prefix + ".br", hidden_dim, 1),
      Wz(prefix + ".Wz", hidden_dim, input_dim),
      Uz(prefix + ".Uz", hidden_dim, hidden_dim),
      bz(prefix + ".bz", hidden_dim, 1),
      Wn(prefix + ".Wn", hidden_dim, input_dim),
      Un(prefix + ".Un", hidden_dim, hidden_dim),
      bn(prefix + ".bn", hidden_dim, 1) {
  Wr.init_xavier(rng);
  Ur.init_xavier(rng);
  Wz.init_xavier(rng);
  Uz.init_xavier(rng);
  Wn.init_xavier(rng);
  Un.init_xavier(rng);
}

std::vector<Parameter*> GruParams::params() {
  return {&Wr, &Ur, &br, &Wz, &Uz, &bz, &Wn, &Un, &bn};
}

GruVars bind_gru(Tape& tape, GruParams& p, Bind mode) {
  return {bind(tape, p.Wr, mode), bind(tape, p.Ur, mode), bind(tape, p.br, mode),
          bind(tape, p.Wz, mode), bind(tape, p.Uz, mode), bind(tape, p.bz, mode),
          bind(tape, p.Wn, mode), bind(tape, p.Un, mode), bind(tape, p.bn, mode)};
}

Var gru_step(Tape& tape, const GruVars& g, Var x, Var h_prev) {
  Var r = tape.sigmoid(tape.add_bias(
      tape.add(tape.matmul(g.Wr, x), tape.matmul(g.Ur, h_prev)), g.br));
  Var z = tape.sigmoid(tape.add_bias(
      tape.add(tape.matmul(g.Wz, x), tape.matmul(g.Uz, h_prev)), g.bz));
  Var n = tape.tanh(tape.add_bias(
      tape.add(tape.matmul(g.Wn, x),
               tape.hadamard(r, tape.matmul(g.Un, h_prev))),
      g.bn));
  // (1-z).*n + z.*h == n + z.*(h - n)
  return tape.add(n, tape.hadamard(z, tape.sub(h_prev, n)));
}

std::vector<Var> gru_sequence(Tape& tape, const GruVars& g,
                              const std::vector<Var>& inputs,
                              const std::vector<int>& lengths, int hidden_dim,
                              bool reverse_direction) {
  const int L = static_cast<int>(inputs.size());
  const int B = static_cast<int>(lengths.size());
  std::vector<Var> states(static_cast<std::size_t>(L));
  Var h = tape.constant(Mat::Zero(hidden_dim, B));
  for (int step = 0; step < L; ++step) {
    const int t = reverse_direction ? L - 1 - step : step;
    Mat mask(1, B);
    for (int b = 0; b < B; ++b) mask(0, b) = t < lengths[static_cast<std::size_t>(b)] ? 1.0 : 0.0;
    Var h_new = gru_step(tape, g, inputs[static_cast<std::size_t>(t)], h);
    // Padded steps carry the previous state: h + m.*(h_new - h).
    Var m = tape.constant(mask);
    h = tape.add(h, tape.colwise_scale(tape.sub(h_new, h), m));
    states[static_cast<std::size_t>(t)] = h;
  }
  return states;
}

}  // namespace fairtext::nn
