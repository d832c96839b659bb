#pragma once

// Quantum parity code: loss-tolerant logical Bell measurements.  A (b, a)
// code carries b blocks of a dual-rail photons; the logical BSM succeeds as
// long as no block loses every photon and at least one block comes through
// complete, with the usual 1/2 haircut per undetermined block.  No Pauli
// errors are introduced, so the QPC secret-key fraction is a pure survival
// probability and its QBER is identically zero.

namespace loopqr {

struct QpcShape {
  int photons_per_block;  // a
  int blocks;             // b
  // max_total_photons caps a*b so the combinatorial (oracle) path stays
  // tractable; the closed form below would be fine far beyond it.
  void validate(int max_total_photons = 512) const;
};

// Closed form for teleporting a lossy QPC qubit through a perfect QPC pair:
//   p = [1 - (1-eta)^a]^b - [1 - (1-eta)^a - eta^a/2]^b,
// evaluated in the factored form (eta^a/2) * sum_j t1^j t2^(b-1-j) which is
// the same polynomial without the subtractive cancellation.
double qpc_success_closed(const QpcShape& shape, double eta);

// Success probability conditioned on exactly mu lost photons:
//   p^mu = [1/C(ab, mu)] sum_i (1 - 2^-(b-i)) C(b, i) sum over compositions
// of mu into i parts within [1, a-1] of prod_k C(a, j_k).
// Zero for mu > (a-1)(b-1).
double qpc_success_with_losses(const QpcShape& shape, long long mu);

// Brute-force oracle: mixture of the per-mu pattern counts over i.i.d.
// photon loss at transmissivity eta.  Must agree with the closed form.
double qpc_success_sum(const QpcShape& shape, double eta);

// r = (1 - 2^-b)^(n-1) * p_qpc^(2m(n-1)) * E((p_qpc^m)^(D_n)); every stored
// signaling period costs m more teleportations that must all succeed.
double skf_qpc(const QpcShape& shape, int n, long long m, double q, double eta_loop);

}  // namespace loopqr
