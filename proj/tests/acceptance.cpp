// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "relwave/fock.hpp"
#include "relwave/observables.hpp"
#include "relwave/propagators.hpp"

using namespace relwave;
using C = std::complex<double>;

namespace {

const auto P = natural_units();

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs_diff(const ComplexField<double>& a, const ComplexField<double>& b) {
  return (to_physical(a).values() - to_physical(b).values()).cwiseAbs().maxCoeff();
}

double peak(const ComplexField<double>& f) { return to_physical(f).values().cwiseAbs().maxCoeff(); }

/// Gaussian (+)-branch packet whose spectrum ends at kmax: k0 = kmax / 4, sigma = 8 / kmax.
InitialData<double> band_packet(double kmax, const SpectralGrid<double>& g) {
  return gaussian_packet(0.0, kmax / 4, 8 / kmax, Branch::plus, g, P, kmax);
}

InitialData<double> superpose(const InitialData<double>& a, const InitialData<double>& b) {
  return InitialData<double>(a.psi0 + b.psi0, a.psi_dot0 + b.psi_dot0);
}

Outcome dispersion_identities() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> dist(0.0, 40.0);
  double product = 0, gap = 0;
  for (int i = 0; i < 1000; ++i) {
    const double k = dist(gen);
    const double wp = omega_branch(k, Branch::plus, P), wm = omega_branch(k, Branch::minus, P);
    const double c2k2 = P.c() * P.c() * k * k;
    product = std::max(product, std::abs(wp * wm - c2k2) / c2k2);
    gap = std::max(gap, std::abs((wm - wp) - 2 * P.mu() * P.c()) / (2 * P.mu() * P.c()));
  }
  return {product < 1e-12 && gap < 1e-12, "w+w- rel err " + sci(product) + ", gap rel err " + sci(gap)};
}

Outcome limits() {
  double low = 0, high = 0;
  for (int i = 1; i <= 1000; ++i) {
    const double k = 0.03 * P.mu() * std::pow(1e-4, (1000.0 - i) / 999.0);
    const double w = omega_branch(k, Branch::plus, P);
    low = std::max(low, std::abs(w - P.c() * k * k / (2 * P.mu())) / w);
    const double K = 30 * P.mu() * std::pow(1e3, (i - 1) / 999.0);
    const double W = omega_branch(K, Branch::plus, P);
    high = std::max(high, std::abs(W - P.c() * (K - P.mu())) / W);
  }
  return {low < 1e-3 && high < 1e-3, "k<=0.03mu " + sci(low) + ", k>=30mu " + sci(high)};
}

Outcome series_convergence() {
  const double k = 0.5 * P.mu();
  const double w = omega_branch(k, Branch::plus, P);
  const double rel = std::abs(truncated_symbol(k * k, 30, P) - w) / w;

  // Least-squares slope of log|error_N| against N at the band edge.
  const long double x = 0.64L;
  const long double exact = std::sqrt(1 + x) - 1;
  long double sn = 0, sy = 0, snn = 0, sny = 0;
  int count = 0;
  for (int n = 30; n <= 60; ++n) {
    const long double y = std::log(std::abs(exact + series_partial_sum<long double>(x, n)));
    sn += n;
    sy += y;
    snn += static_cast<long double>(n) * n;
    sny += n * y;
    ++count;
  }
  const double slope = static_cast<double>((count * sny - sn * sy) / (count * snn - sn * sn));
  const double target = std::log(0.64);
  const double slope_err = std::abs(slope / target - 1);
  return {rel < 1e-12 && slope_err < 0.1,
          "N=30 rel err " + sci(rel) + ", slope " + sci(slope) + " vs log x " + sci(target)};
}

Outcome unitarity() {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto plus = split(random_initial_data(11, 1.0, g), P);
  const auto plus_only = ModeAmplitudes<double>(g, P, plus.plus(), ComplexVector<double>::Zero(g.size()));
  const auto mixed = plus;
  const double dt = 0.1;

  const double n0 = total_norm(field_at(plus_only, 0.0));
  const double b0 = branch_norm(mixed, Branch::plus), m0 = branch_norm(mixed, Branch::minus);
  double drift = 0;
  auto a = plus_only;
  auto b = mixed;
  for (int step = 1; step <= 1000; ++step) {
    a = evolve_exact(a, dt);
    b = evolve_exact(b, dt);
    drift = std::max({drift, std::abs(total_norm(field_at(a, 0.0)) - n0) / n0,
                      std::abs(branch_norm(b, Branch::plus) - b0) / b0, std::abs(branch_norm(b, Branch::minus) - m0) / m0});
  }
  for (int step = 0; step < 1000; ++step) b = evolve_exact(b, -dt);
  const auto start = field_at(mixed, 0.0);
  const double back = max_abs_diff(field_at(b, 0.0), start) / peak(start);
  return {drift < 1e-12 && back < 1e-12, "norm drift " + sci(drift) + ", round trip " + sci(back)};
}

Outcome schrodinger_limit() {
  auto deviation = [](double kmax, double box, double t) {
    const SpectralGrid<double> g(1, 256, box);
    const auto d = band_packet(kmax, g);
    const auto exact = field_at(evolve_exact(split(d, P), t), 0.0);
    return max_abs_diff(exact, schrodinger_reference(d.psi0, t, P)) / peak(exact);
  };
  const double t0 = 1 / (P.mu() * P.c());
  const double coarse = deviation(0.1 * P.mu(), 1000.0, t0);
  const double fine = deviation(0.05 * P.mu(), 2000.0, 4 * t0);
  const double ratio = coarse / fine;
  return {std::abs(ratio - 4) <= 0.8, "deviation " + sci(coarse) + " -> " + sci(fine) + ", ratio " + sci(ratio)};
}

Outcome continuity() {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto amps = split(band_packet(0.5 * P.mu(), g), P);
  const double rate = probability_rate(amps, 0.0).abs().maxCoeff();
  double r[3];
  for (int n = 1; n <= 3; ++n) r[n - 1] = continuity_residual(amps, n, 0.0).abs().maxCoeff();
  const double f1 = r[0] / r[1], f2 = r[1] / r[2];
  const double last = r[2] / rate;
  return {f1 >= 3 && f2 >= 3 && last < 1e-4,
          "factors " + sci(f1) + ", " + sci(f2) + "; N=3 residual/rate " + sci(last)};
}

Outcome conservation() {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto packet = split(band_packet(0.5 * P.mu(), g), P);
  const auto mixed = split(superpose(band_packet(0.5 * P.mu(), g),
                                     gaussian_packet(20.0, -0.1, 12.0, Branch::minus, g, P)), P);
  const double dt = 0.05;

  double h_drift = 0, p_drift = 0, closed = 0;
  for (const auto* initial : {&packet, &mixed}) {
    const bool plus_only = initial == &packet;
    auto amps = *initial;
    double h0 = 0, p0 = 0, s0 = 0;
    for (int step = 0; step <= 1000; ++step) {
      const auto s = jet_at(amps, 0.0);
      const double h = total_energy(s, P);
      const double p = total_momentum(s, P)[0];
      const double ps = plus_only ? integrate(g, momentum_density_series(s.psi, P, 3)[0]) : 0.0;
      if (step == 0) {
        h0 = h;
        p0 = p;
        s0 = ps;
        closed = std::max(closed, std::abs(h - energy_closed_form(amps)) / std::abs(h));
      }
      h_drift = std::max(h_drift, std::abs(h - h0) / std::abs(h0));
      p_drift = std::max(p_drift, std::abs(p - p0) / std::abs(p0));
      if (plus_only) p_drift = std::max(p_drift, std::abs(ps - s0) / std::abs(s0));
      if (step < 1000) amps = evolve_exact(amps, dt);
    }
  }
  return {h_drift < 1e-10 && p_drift < 1e-10 && closed < 1e-10,
          "H drift " + sci(h_drift) + ", P drift " + sci(p_drift) + ", quadrature vs closed form " + sci(closed)};
}

Outcome split_round_trip() {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto data = random_initial_data(5, 2.0, g);
  const auto back = reconstruct(split(data, P), 0.0);
  const double psi_err = max_abs_diff(back.psi, data.psi0);
  const double pi_err = max_abs_diff(back.pi, generalized_momentum(data.psi0, data.psi_dot0, P));

  const auto base = random_field(6, 2.0, g);
  const double leak_minus = branch_norm(split(branch_state(base, Branch::plus, P), P), Branch::minus);
  const double leak_plus = branch_norm(split(branch_state(base, Branch::minus, P), P), Branch::plus);
  const double leak = std::max(leak_minus, leak_plus);
  return {psi_err < 1e-10 && pi_err < 1e-10 && leak < 1e-12,
          "psi err " + sci(psi_err) + ", pi err " + sci(pi_err) + ", opposite-branch norm " + sci(leak)};
}

Outcome fock_algebra() {
  const double box = 2 * std::numbers::pi;
  const auto space = make_fock({0.0, -1.0}, 3, box);
  const auto comm = commutator_check(space);
  const auto eig = one_particle_check(space, P);
  const auto gen = build_generators(space, P);
  const auto vac = space.vacuum();
  const double e0 = vac.dot(gen.hamiltonian_symmetrized * vac).real();
  double expected = 0;
  for (double k : space.modes()) expected += P.hbar() * P.c() * std::sqrt(P.mu() * P.mu() + k * k);
  const double zpe = std::abs(e0 - expected) / expected;

  const double dv = box / 2;
  const auto rows = field_commutator_delta(space, P, {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const double equal_time = std::abs(rows[0].commutator - C(0, P.hbar() / dv));
  double table = 0;
  for (const auto& r : rows) table = std::max(table, r.deviation);

  const bool pass = comm.max_deviation() == 0.0 && comm.truncation_edge_value == -3.0 && eig.max_residual() == 0.0 &&
                    zpe < 1e-12 && equal_time < 1e-12 && table < 1e-12;
  return {pass, "dim " + std::to_string(space.dim()) + ", commutator dev " + sci(comm.max_deviation()) +
                    ", eigen residual " + sci(eig.max_residual()) + ", E0 rel err " + sci(zpe) + ", [psi,pi] err " +
                    sci(equal_time) + ", delta table dev " + sci(table)};
}

Outcome indefiniteness() {
  const SpectralGrid<double> g(1, 256, 200.0);
  const auto data = superpose(gaussian_packet(-8.0, 0.3, 8.0, Branch::plus, g, P),
                              gaussian_packet(8.0, -0.3, 8.0, Branch::minus, g, P));
  const auto amps = split(data, P);
  const double t = 1.0;
  const auto phi = kgf_fields(jet_at(amps, t), t, P);
  const auto rho = kgf_rho(phi.psi, phi.dpsi, P);
  const auto prob = probability_density(field_at(amps, t));
  const bool pass = rho.minCoeff() < 0 && rho.maxCoeff() > 0 && prob.minCoeff() >= 0;
  return {pass, "kgf_rho in [" + sci(rho.minCoeff()) + ", " + sci(rho.maxCoeff()) + "], min |psi|^2 " +
                    sci(prob.minCoeff())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 dispersion identities", dispersion_identities},
      {"AC2 dispersion limits", limits},
      {"AC3 series convergence", series_convergence},
      {"AC4 unitarity and reversibility", unitarity},
      {"AC5 Schrodinger limit scaling", schrodinger_limit},
      {"AC6 continuity by order", continuity},
      {"AC7 energy and momentum conservation", conservation},
      {"AC8 split/reconstruct round trip", split_round_trip},
      {"AC9 Fock algebra", fock_algebra},
      {"AC10 indefinite KGF density", indefiniteness},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
