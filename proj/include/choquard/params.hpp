#pragma once

#include <utility>

namespace choquard {

/// Problem parameters: space dimension N >= 3 and Riesz exponent mu in (0, N).
struct Params {
  int N = 3;
  double mu = 1.0;

  /// Validating constructor; throws ConfigError naming the violated bound.
  static Params make(int N, double mu);
  void validate() const;
};

struct Exponents {
  double twoStar;    // 2N/(N-2)
  double twoStarMu;  // (2N-mu)/(N-2)
  double p;          // (N+mu)/(N-2)
};

Exponents derive_exponents(const Params& params);

/// HLS constant C(N, mu) for t = r = 2N/(2N-mu), in the closed form
///   pi^{mu/2} Gamma(N/2-mu/2)/Gamma(N-mu/2) * (Gamma(N/2)/Gamma(mu/2))^{-1+mu/N}.
/// This is the constant that enters S_HL, beta and the family normalization.
double sharp_hls_constant(const Params& params);

/// Lieb's sharp HLS constant, with Gamma(N) in place of Gamma(mu/2) in the
/// last factor. This is the value actually attained by the extremal
/// A(gamma^2+|x-a|^2)^{-(2N-mu)/2}; it is larger than sharp_hls_constant for
/// mu < N and the two agree only in the limit mu -> N.
double lieb_hls_constant(const Params& params);

/// Best Sobolev constant S = pi N (N-2) (Gamma(N/2)/Gamma(N))^{2/N} (Aubin, Talenti).
double sobolev_constant(const Params& params);

struct Interval {
  double lo;
  double hi;
};

struct ConstantSet {
  double cNmu;            // sharp_hls_constant
  double S;               // best Sobolev constant
  double sHL;             // S / cNmu^{(N-2)/(2N-mu)}
  double beta;            // level of sHL under the quotient -> energy map
  Interval window;        // (beta, 2 beta)
  Interval quotientWindow;  // (sHL, 2^{(N-mu+2)/(2N-mu)} sHL)

  // Same chain evaluated with lieb_hls_constant. These are the values the
  // discrete functionals converge to.
  double liebCNmu;
  double liebSHL;
  double liebBeta;
};

ConstantSet best_constants(const Params& params);

/// I(lambda u) for u on the constraint manifold with quotient q, after the
/// rescaling lambda = q^{(N-2)/(2(N-mu+2))}:
///   ((N-mu+2)/(2(2N-mu))) q^{(2N-mu)/(N-mu+2)}.
double level_of_quotient(const Params& params, double quotient);

/// Exponent (N-2)/(2(N-mu+2)) of the rescaling from the manifold to solutions.
double rescaling_exponent(const Params& params);

/// Amplitude of the test family u_t^sigma:
///   S^{(N-mu)(2-N)/(4(N-mu+2))} C(N,mu)^{(2-N)/(2(N-mu+2))}.
double family_amplitude(const Params& params);

/// Amplitude A for which A (1/(1+|x|^2))^{(N-2)/2} solves
///   -Delta u = (|x|^{-mu} * u^{2*_mu}) u^{2*_mu - 1}  in R^N.
/// Uses the Lieb constant and the Aubin-Talenti factor [N(N-2)]^{(N-2)/4}.
double solution_amplitude(const Params& params);

/// Dirichlet energy of (1/(1+|x|^2))^{(N-2)/2}; invariant under the bubble
/// rescaling, so it is the energy of every unit-amplitude bubble.
///   (N-2)^2 |S^{N-1}| B((N+2)/2, (N-2)/2) / 2
double unit_bubble_dirichlet(const Params& params);

}  // namespace choquard
