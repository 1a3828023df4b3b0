#include <doctest.h>

#include "relwave/propagators.hpp"

using namespace relwave;
using C = std::complex<double>;

namespace {

const auto P = natural_units();

double max_diff(const ComplexField<double>& a, const ComplexField<double>& b) {
  return (to_physical(a).values() - to_physical(b).values()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("exact evolution: identity, period, composition and reversibility") {
  const SpectralGrid<double> g(1, 64, 40.0);
  const auto amps = split(random_initial_data(1, 3.0, g), P);
  const auto same = evolve_exact(amps, 0.0);
  CHECK(same.plus() == amps.plus());
  CHECK(same.minus() == amps.minus());

  const auto ab = evolve_exact(evolve_exact(amps, 0.4), 1.1);
  const auto direct = evolve_exact(amps, 1.5);
  CHECK((ab.plus() - direct.plus()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((ab.minus() - direct.minus()).cwiseAbs().maxCoeff() < 1e-13);

  const auto back = evolve_exact(evolve_exact(amps, 2.3), -2.3);
  CHECK(max_diff(field_at(back, 0.0), field_at(amps, 0.0)) < 1e-12);

  const SpectralGrid<double> unit(1, 16, 2 * std::numbers::pi);
  const auto pw = split(plane_wave(1.0, Branch::plus, unit, P), P);
  const double period = 2 * std::numbers::pi / omega_branch(1.0, Branch::plus, P);
  CHECK(max_diff(field_at(evolve_exact(pw, period), 0.0), field_at(pw, 0.0)) < 1e-10);
}

TEST_CASE("branch norms are constant under exact evolution") {
  const SpectralGrid<double> g(1, 64, 40.0);
  const auto amps = split(random_initial_data(2, 3.0, g), P);
  const auto later = evolve_exact(amps, 17.0);
  CHECK(branch_norm(later, Branch::plus) == doctest::Approx(branch_norm(amps, Branch::plus)).epsilon(1e-14));
  CHECK(branch_norm(later, Branch::minus) == doctest::Approx(branch_norm(amps, Branch::minus)).epsilon(1e-14));

  const auto single = split(gaussian_packet(0.0, 0.4, 3.0, Branch::minus, g, P), P);
  for (double t : {0.0, 1.0, 10.0}) CHECK(norm_squared(field_at(single, t)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated evolution") {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto d = gaussian_packet(0.0, 0.125, 16.0, Branch::plus, g, P, 0.5);
  CHECK(max_diff(evolve_truncated(d.psi0, 3.0, 1, P), schrodinger_reference(d.psi0, 3.0, P)) < 1e-14);

  const auto exact = field_at(evolve_exact(split(d, P), 1.0), 0.0);
  const double e2 = max_diff(evolve_truncated(d.psi0, 1.0, 2, P), exact);
  const double e3 = max_diff(evolve_truncated(d.psi0, 1.0, 3, P), exact);
  CHECK(e3 < e2 / 4);

  CHECK_THROWS_AS(evolve_truncated(d.psi0, 1.0, 0, P), DomainError);
  CHECK_THROWS_AS(evolve_truncated(d.psi0, 1.0, 65, P), DomainError);
}

TEST_CASE("order-30 truncation matches the exact phase of a plane wave") {
  const SpectralGrid<double> g(1, 16, 2 * std::numbers::pi / 0.2);
  const auto d = plane_wave(0.6, Branch::plus, g, P);
  const double t = 5.0;
  const auto exact = field_at(evolve_exact(split(d, P), t), 0.0);
  CHECK(max_diff(evolve_truncated(d.psi0, t, 30, P), exact) < 1e-12 * exact.values().cwiseAbs().maxCoeff());
}

TEST_CASE("RK4 on the truncated series agrees with the spectral exponential") {
  const SpectralGrid<double> g(1, 64, 60.0);
  const auto d = gaussian_packet(0.0, 0.2, 5.0, Branch::plus, g, P, 0.6);
  const TruncatedSeriesRk4<double> rk(P, 3);
  auto psi = d.psi0;
  const double dt = 0.01;
  for (int i = 0; i < 200; ++i) psi = rk.step(psi, dt);
  CHECK(max_diff(psi, evolve_truncated(d.psi0, 2.0, 3, P)) < 1e-9);
  CHECK_THROWS_AS(TruncatedSeriesRk4<double>(P, 0), DomainError);
}

TEST_CASE("Schrodinger reference") {
  const SpectralGrid<double> g(1, 32, 10.0);
  const auto f = random_field(3, 2.0, g);
  CHECK(max_diff(schrodinger_reference(f, 0.0, P), f) < 1e-15);
  const auto constant = ComplexField<double>::from_function(g, [](const KVector<double>&) { return C(0.3, 0.1); });
  CHECK(max_diff(schrodinger_reference(constant, 12.0, P), constant) < 1e-14);
}

TEST_CASE("deviation from the Schrodinger limit scales linearly in epsilon as the packet widens") {
  // Doubling the packet scale L quarters epsilon. The run time grows with
  // t0 ~ L^2 so that the dimensionless experiment is unchanged.
  auto deviation = [](double scale, double t) {
    const SpectralGrid<double> g(1, 256, 100.0 * scale);
    const auto d = gaussian_packet(0.0, 0.0, 4.0 * scale, Branch::plus, g, P);
    const auto exact = field_at(evolve_exact(split(d, P), t), 0.0);
    return max_diff(exact, schrodinger_reference(d.psi0, t, P)) / exact.values().cwiseAbs().maxCoeff();
  };
  CHECK(deviation(1.0, 10.0) / deviation(2.0, 40.0) == doctest::Approx(4.0).epsilon(0.1));
  // At one fixed physical time the deviation falls as epsilon squared instead.
  CHECK(deviation(1.0, 2.0) / deviation(2.0, 2.0) == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("KGF phase map") {
  const SpectralGrid<double> g(1, 32, 2 * std::numbers::pi);
  const auto f = random_field(4, 3.0, g);
  CHECK(max_diff(kgf_phase_map(f, 0.0, P, PhaseDirection::to_phi), f) == 0.0);
  const auto there = kgf_phase_map(f, 1.3, P, PhaseDirection::to_phi);
  CHECK(max_diff(kgf_phase_map(there, 1.3, P, PhaseDirection::to_psi), f) < 1e-14);

  // A mapped plus plane wave oscillates at c sqrt(mu^2 + k^2), i.e. solves the KGF equation.
  const auto q = make_params(1.2, 0.9, 1.0);
  const auto amps = split(plane_wave(2.0, Branch::plus, g, q), q);
  const double h = 1e-3, t = 0.8;
  auto phi = [&](double s) { return kgf_phase_map(field_at(amps, s), s, q, PhaseDirection::to_phi); };
  const auto f0 = phi(t);
  const Eigen::VectorXcd dtt = (phi(t + h).values() - 2.0 * f0.values() + phi(t - h).values()) / (h * h);
  const Eigen::VectorXcd lap = laplacian_power(f0, 1).values();
  const double mu2 = q.mu() * q.mu();
  const Eigen::VectorXcd residual = dtt / (q.c() * q.c()) - lap + mu2 * f0.values();
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-5 * mu2 * f0.values().cwiseAbs().maxCoeff());

  // Spectral check of the same frequency without finite differences.
  const double w = omega_branch(2.0, Branch::plus, q) + q.mu() * q.c();
  CHECK(w * w == doctest::Approx(q.c() * q.c() * (mu2 + 4.0)).epsilon(1e-12));
  const C ratio = phi(t + 0.1)[0] / phi(t)[0];
  CHECK(std::abs(ratio - std::polar(1.0, -w * 0.1)) < 1e-10);
}
