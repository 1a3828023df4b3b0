#include <doctest.h>

#include "relwave/observables.hpp"
#include "relwave/propagators.hpp"
#include "relwave/wavefield.hpp"

using namespace relwave;
using C = std::complex<double>;

namespace {

const auto P = natural_units();

double max_diff(const ComplexField<double>& a, const ComplexField<double>& b) {
  return (to_physical(a).values() - to_physical(b).values()).cwiseAbs().maxCoeff();
}

double centroid(const ComplexField<double>& psi) {
  const auto f = to_physical(psi);
  const auto& g = f.grid();
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double w = std::norm(f[i]);
    num += w * g.position(i)[0];
    den += w;
  }
  return num / den;
}

double width(const ComplexField<double>& psi) {
  const auto f = to_physical(psi);
  const auto& g = f.grid();
  const double c = centroid(f);
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double w = std::norm(f[i]);
    num += w * std::pow(g.position(i)[0] - c, 2);
    den += w;
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("plane waves") {
  const SpectralGrid<double> g(1, 32, 2 * std::numbers::pi);
  const auto still = plane_wave(0.0, Branch::plus, g, P);
  CHECK(norm_squared(still.psi0) == doctest::Approx(1.0));
  CHECK(still.psi_dot0.values().cwiseAbs().maxCoeff() == 0.0);

  const auto heavy = plane_wave(0.0, Branch::minus, g, P);
  CHECK((heavy.psi_dot0.values() - C(0, 2) * heavy.psi0.values()).cwiseAbs().maxCoeff() < 1e-15);

  const auto moving = split(plane_wave(1.0, Branch::plus, g, P), P);
  CHECK(branch_norm(moving, Branch::minus) < 1e-12);
  CHECK(branch_norm(moving, Branch::plus) == doctest::Approx(1.0));

  CHECK_THROWS_AS(plane_wave(0.5, Branch::plus, g, P), DomainError);
}

TEST_CASE("split is a per-mode branch projector") {
  const SpectralGrid<double> g(1, 64, 30.0);
  const auto psi = random_field(11, 3.0, g);

  const auto plus = split(branch_state(psi, Branch::plus, P), P);
  CHECK(plus.minus().cwiseAbs().maxCoeff() < 1e-15);
  const auto minus = split(branch_state(psi, Branch::minus, P), P);
  CHECK(minus.plus().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("split of a static plane wave weights the branches by the opposite frequencies") {
  const SpectralGrid<double> g(1, 16, 2 * std::numbers::pi);
  const auto pw = plane_wave(1.0, Branch::plus, g, P);
  const InitialData<double> data(pw.psi0, ComplexField<double>(g, Representation::physical));
  const auto amps = split(data, P);
  const auto idx = g.index_of_wavenumber(KVector<double>(1, 0, 0));
  const double wp = omega_branch(1.0, Branch::plus, P);
  const double wm = omega_branch(1.0, Branch::minus, P);
  CHECK(std::abs(amps.plus()[idx]) / std::abs(amps.minus()[idx]) == doctest::Approx(wm / wp).epsilon(1e-13));
}

TEST_CASE("reconstruct inverts split") {
  const SpectralGrid<double> g(1, 128, 40.0);
  const auto data = random_initial_data(99, 4.0, g);
  const auto amps = split(data, P);
  const auto rec = reconstruct(amps, 0.0);
  const double scale = data.psi0.values().cwiseAbs().maxCoeff();
  CHECK(max_diff(rec.psi, data.psi0) < 1e-10 * scale);
  CHECK(max_diff(field_at(amps, 0.0, 1), data.psi_dot0) < 1e-10 * data.psi_dot0.values().cwiseAbs().maxCoeff());

  // The mode-sum momentum equals the Lagrangian definition at any time.
  for (double t : {0.0, 0.7, 3.1}) {
    const auto r = reconstruct(amps, t);
    const auto pi = generalized_momentum(field_at(amps, t), field_at(amps, t, 1), P);
    CHECK(max_diff(r.pi, pi) < 1e-12 * pi.values().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("generalized momentum of a single plus mode") {
  const auto q = make_params(1.5, 2.0, 0.8);
  const SpectralGrid<double> g(1, 16, 2 * std::numbers::pi);
  const auto amps = split(plane_wave(2.0, Branch::plus, g, q), q);
  const auto r = reconstruct(amps, 0.4);
  const C expected = C(0, q.hbar() / 2) * std::sqrt(q.mu() * q.mu() + 4.0) / q.mu();
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(std::abs(r.pi[i] / std::conj(r.psi[i]) - expected) < 1e-12);
}

TEST_CASE("a-amplitude weights") {
  CHECK(a_amplitude_weight(0.0, P) == 1.0);
  CHECK(a_amplitude_weight(1.0, P) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
}

TEST_CASE("mode energy matches the k-space closed form and the density quadrature") {
  const auto q = make_params(0.7, 1.3, 1.1);
  const SpectralGrid<double> g(1, 64, 25.0);
  const auto dk = g.wavenumber_spacing();
  auto psi = ComplexField<double>::from_function(g, [&](const KVector<double>& x) {
    return std::polar(0.3, 2 * dk * x[0]) + std::polar(0.2, -5 * dk * x[0] + 0.4);
  });
  const auto amps = split(branch_state(psi, Branch::plus, q), q);
  const double quad = total_energy(jet_at(amps, 0.0), q);
  CHECK(energy_from_modes(amps) == doctest::Approx(quad).epsilon(1e-10));
  CHECK(energy_closed_form(amps) == doctest::Approx(quad).epsilon(1e-10));

  const auto mixed = split(random_initial_data(5, 2.0, g), q);
  const double mixed_quad = total_energy(jet_at(mixed, 0.0), q);
  CHECK(energy_from_modes(mixed) == doctest::Approx(mixed_quad).epsilon(1e-10));
  CHECK(energy_closed_form(mixed) == doctest::Approx(mixed_quad).epsilon(1e-10));
}

TEST_CASE("gaussian packets") {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto d = gaussian_packet(10.0, 0.3, 8.0, Branch::plus, g, P);
  CHECK(norm_squared(d.psi0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(centroid(d.psi0) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(width(d.psi0) == doctest::Approx(8.0).epsilon(1e-6));

  // Packets wrap around the periodic box.
  const auto wrapped = gaussian_packet(95.0, 0.0, 4.0, Branch::plus, g, P);
  CHECK(std::abs(wrapped.psi0[0]) > 0.5 * wrapped.psi0.values().cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(gaussian_packet(0.0, 0.3, 0.0, Branch::plus, g, P), DomainError);
  CHECK_THROWS_AS(gaussian_packet(0.0, 0.3, 1.0, Branch::plus, g, P), DomainError);
  CHECK_THROWS_AS(gaussian_packet(0.0, 0.3, 20.0, Branch::plus, g, P), DomainError);
  CHECK_THROWS_AS(gaussian_packet(0.0, 3.9, 8.0, Branch::plus, g, P), DomainError);
}

TEST_CASE("packet centroid moves at the group velocity") {
  const SpectralGrid<double> g(1, 512, 800.0);
  const double k0 = 1.0;
  const auto d = gaussian_packet(-150.0, k0, 30.0, Branch::plus, g, P);
  const auto amps = split(d, P);
  const double t = 300.0;
  const double v = (centroid(field_at(evolve_exact(amps, t), 0.0)) - centroid(d.psi0)) / t;
  CHECK(v == doctest::Approx(group_velocity(k0, P)).epsilon(0.01));
}

TEST_CASE("packet at rest stays put and spreads") {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto d = gaussian_packet(0.0, 0.0, 5.0, Branch::plus, g, P);
  const auto later = field_at(evolve_exact(split(d, P), 60.0), 0.0);
  CHECK(std::abs(centroid(later)) < 1e-10);
  CHECK(width(later) > 1.2 * width(d.psi0));
}

TEST_CASE("random data is deterministic and band limited") {
  const SpectralGrid<double> g(1, 64, 20.0);
  const auto a = random_field(42, 1.0, g);
  const auto b = random_field(42, 1.0, g);
  CHECK(a.values() == b.values());
  CHECK(a.values() != random_field(43, 1.0, g).values());
  const auto spec = to_spectral(a);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::sqrt(g.k_squared(i)) > 1.0) CHECK(std::abs(spec[i]) < 1e-14);
  }
}

TEST_CASE("reflection") {
  const SpectralGrid<double> g(1, 64, 20.0);
  const auto d = gaussian_packet(2.0, 0.5, 0.8, Branch::plus, g, P);
  const auto r = reflect(d.psi0);
  CHECK(centroid(r) == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(max_diff(reflect(r), d.psi0) == 0.0);
}

TEST_CASE("InitialData rejects mismatched grids") {
  const SpectralGrid<double> a(1, 16, 1.0), b(1, 16, 2.0);
  CHECK_THROWS_AS(InitialData<double>(ComplexField<double>(a, Representation::physical),
                                      ComplexField<double>(b, Representation::physical)),
                  DomainError);
}
