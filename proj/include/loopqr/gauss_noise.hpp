#pragma once

// Gaussian displacement-noise bookkeeping for the GKP qubits.  Finite
// squeezing and (preamplified) loop loss both act as zero-mean Gaussian
// shift channels in phase space; a logical Pauli error happens when the
// accumulated shift lands in the wrong correction stripe.

namespace loopqr {

// s [dB]  ->  delta^2 = 10^(-s/10) / 2.
double squeezing_to_variance(double s_db);

// Inverse of the above: s = -10 log10(2 delta^2).
double variance_to_squeezing(double delta2);

// Preamplification turns a loss channel of transmissivity eta into a shift
// channel of variance 1 - eta.
double loss_to_shift_variance(double eta);

// Classically-corrected amplification instead gives (1 - eta) / eta, always
// worse than preamplification; kept only for that comparison.
double cc_shift_variance(double eta);

// Probability that a Gaussian shift of total variance sigma2_tot escapes the
// correctable stripes: sum over k of the Gaussian mass on
// [(2k+1)sqrt(pi) - sqrt(pi)/2, (2k+1)sqrt(pi) + sqrt(pi)/2].
// Always in [0, 1/2); truncation tail is kept below 1e-15.
double stripe_error_prob(double sigma2_tot);

}  // namespace loopqr
