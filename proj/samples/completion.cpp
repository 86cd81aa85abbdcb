// Completes a small 2x2-block band and prints what the solver found.

#include <iostream>

#include <mecirc/mecirc.hpp>

int main() {
  using mecirc::Matrix;

  Matrix s0(2, 2), s1(2, 2);
  s0 << 2.0, 0.5, 0.5, 1.0;
  s1 << 0.6, 0.2, -0.1, 0.3;
  const mecirc::BandData band({s0, s1});
  const mecirc::Index N = 12;

  // Starting guess: the circulant built from the maximum-entropy Toeplitz extension.
  const auto approx = mecirc::circulant_approx(band, N);
  std::cout << "toeplitz extension: inverse off-band norm " << mecirc::offband_norm(mecirc::circ_inverse(approx), band.n()) << '\n';

  const auto res = mecirc::solve(band, N);
  const auto v = mecirc::verify_solution(res, band);
  std::cout << "status " << mecirc::to_string(res.status) << " after " << res.iterations << " iterations\n"
            << "band residual " << v.band_residual << ", inverse off-band residual " << v.dempster_residual << '\n'
            << "entropy " << v.entropy << '\n';

  std::cout << "Sigma_2 of the completion:\n" << res.sigma.block(N - 2) << '\n';
  return res.converged() ? 0 : 1;
}
