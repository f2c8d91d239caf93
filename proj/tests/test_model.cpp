#include <cmath>

#include "doctest.h"
#include "oblim/errors.hpp"
#include "oblim/incompressible.hpp"
#include "oblim/model.hpp"
#include "oblim/random.hpp"
#include "support.hpp"

using namespace oblim;
using oblim::test::fd4;
using oblim::test::fd4_laplacian;
using oblim::test::kPi;
using oblim::test::max_diff;

namespace {

// Term-by-term evaluation of the compressible right-hand side with finite
// differences and pointwise products; no spectral machinery involved.
TendencyParts fd_compressible(const CompressibleState& s, const PhysicalParams& p) {
  const GridSpec& g = s.grid();
  const int d = g.dim;
  const double eps = s.epsilon;
  const std::size_t N = g.size();
  TendencyParts out(g);

  std::vector<std::vector<Field>> G(static_cast<std::size_t>(d));  // G[i][j] = d_j u_i
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G[static_cast<std::size_t>(i)].push_back(fd4(s.u[i], j));
  Field div(g);
  for (int i = 0; i < d; ++i) div += G[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];

  for (int i = 0; i < d; ++i) {
    out.d_phi -= (1.0 / eps) * fd4(s.u[i], i);
    out.d_phi -= fd4(hadamard(s.phi, s.u[i]), i);
  }

  Field g_poly(g);
  for (std::size_t x = 0; x < N; ++x) g_poly[x] = p.beta * (p.L_poly - 1.0) * s.eta[x] + p.zbar * s.eta[x] * s.eta[x];
  std::vector<Field> dphi, dgp, ddiv;
  for (int i = 0; i < d; ++i) {
    dphi.push_back(fd4(s.phi, i));
    dgp.push_back(fd4(g_poly, i));
    ddiv.push_back(fd4(div, i));
  }
  for (int i = 0; i < d; ++i) {
    const Field lap = fd4_laplacian(s.u[i]);
    Field div_tau(g);
    for (int j = 0; j < d; ++j) div_tau += fd4(s.tau.at(i, j), j);
    Field& du = out.d_u[i];
    for (std::size_t x = 0; x < N; ++x) {
      const double rho = 1.0 + eps * s.phi[x];
      double adv = 0.0;
      for (int j = 0; j < d; ++j) adv += s.u[j][x] * G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][x];
      const double pprime = p.a * p.gamma * std::pow(rho, p.gamma - 1.0);
      du[x] = -adv - (1.0 / eps) * (pprime / rho) * dphi[static_cast<std::size_t>(i)][x] -
              dgp[static_cast<std::size_t>(i)][x] / rho + (p.mu1 / rho) * lap[x] +
              (p.mu2 / rho) * ddiv[static_cast<std::size_t>(i)][x] + (p.beta / p.k) / rho * div_tau[x];
    }
  }

  for (int i = 0; i < d; ++i) out.d_eta -= fd4(hadamard(s.eta, s.u[i]), i);
  out.d_eta += p.nu * fd4_laplacian(s.eta);

  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Field& dt = out.d_tau.at(i, j);
      const Field& t = s.tau.at(i, j);
      for (int l = 0; l < d; ++l) dt -= fd4(hadamard(s.u[l], t), l);
      for (std::size_t x = 0; x < N; ++x) {
        double stretch = 0.0;
        for (int l = 0; l < d; ++l)
          stretch += G[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)][x] * s.tau.at(l, j)[x] +
                     s.tau.at(i, l)[x] * G[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)][x];
        const double sym = G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][x] +
                           G[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)][x];
        dt[x] += stretch + p.k * s.eta[x] * sym - 0.5 * p.A0 * t[x];
      }
      dt += p.nu * fd4_laplacian(t);
    }
  return out;
}

double max_abs(const TendencyParts& t) {
  return std::max({t.d_phi.max_abs(), t.d_u.max_abs(), t.d_eta.max_abs(), t.d_tau.max_abs()});
}

double max_diff(const TendencyParts& a, const TendencyParts& b) {
  return std::max({oblim::test::max_diff(a.d_phi, b.d_phi), oblim::test::max_diff(a.d_u, b.d_u),
                   oblim::test::max_diff(a.d_eta, b.d_eta), oblim::test::max_diff(a.d_tau, b.d_tau)});
}

PhysicalParams generic_params() {
  PhysicalParams p;
  p.a = 1.3;
  p.gamma = 1.4;
  p.mu1 = 0.2;
  p.mu2 = 0.05;
  p.nu = 0.15;
  p.beta = 0.7;
  p.k = 1.5;
  p.L_poly = 3.0;
  p.zbar = 0.25;
  p.A0 = 2.0;
  return p;
}

}  // namespace

TEST_SUITE("model_core") {

TEST_CASE("parameter validation") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  auto expect_key = [](PhysicalParams q, const char* key) {
    try {
      q.validate();
      FAIL("accepted invalid ", key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  PhysicalParams q = p;
  q.gamma = 1.0;
  expect_key(q, "gamma");
  q = p;
  q.mu1 = 0.0;
  expect_key(q, "mu1");
  q = p;
  q.beta = -0.1;
  expect_key(q, "beta");
  q = p;
  q.L_poly = 0.5;
  expect_key(q, "L_poly");
  q = p;
  q.A0 = 0.0;
  expect_key(q, "A0");
}

TEST_CASE("pressure law") {
  const GridSpec g = make_grid(2, 16, 1.0);
  PhysicalParams p;
  const Field one(g, 1.0), two(g, 2.0);
  CHECK(max_diff(pressure(one, p), Field(g, 1.0)) == 0.0);
  CHECK(max_diff(pressure_prime(one, p), Field(g, 2.0)) == 0.0);
  CHECK(max_diff(pressure(two, p), Field(g, 4.0)) == 0.0);
  CHECK(max_diff(pressure_prime(two, p), Field(g, 4.0)) == 0.0);

  p.gamma = 1.4;
  p.a = 0.8;
  Lcg64 gen(3);
  Field rho(g);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 0.5 + gen.uniform();
  const Field P = pressure(rho, p);
  const Field Pp = pressure_prime(rho, p);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double want = std::exp(p.gamma * std::log(rho[i])) * p.a;
    CHECK(std::abs(P[i] - want) <= 1e-14 * want);
    CHECK(Pp[i] > 0.0);
  }
  rho[3] = 0.0;
  CHECK_THROWS_AS(pressure(rho, p), StateError);
  CHECK_THROWS_AS(pressure_prime(rho, p), StateError);
}

TEST_CASE("rest and uniform states have zero tendency") {
  const GridSpec g = make_grid(2, 16, 2.0 * kPi);
  const PhysicalParams p = generic_params();
  CompressibleState s = CompressibleState::rest(g, 0.3);
  CHECK(max_abs(compressible_tendency(s, p).total()) == 0.0);
  s.phi = Field(g, 0.4);
  CHECK(max_abs(compressible_tendency(s, p).total()) < 1e-13);
  CHECK(max_abs(incompressible_tendency(IncompressibleState::rest(g), p).total()) == 0.0);
}

TEST_CASE("uniform fields only relax the stress") {
  const GridSpec g = make_grid(3, 8, 1.0);
  const PhysicalParams p = generic_params();
  CompressibleState s = CompressibleState::rest(g, 0.5);
  s.phi = Field(g, 0.2);
  s.u[0] = Field(g, 0.3);
  s.u[2] = Field(g, -0.1);
  s.eta = Field(g, 1.4);
  for (std::size_t c = 0; c < s.tau.components.size(); ++c) s.tau.components[c] = Field(g, 0.1 * (c + 1.0));
  const TendencyParts t = compressible_tendency(s, p).total();
  CHECK(t.d_phi.max_abs() < 1e-13);
  CHECK(t.d_u.max_abs() < 1e-13);
  CHECK(t.d_eta.max_abs() < 1e-13);
  CHECK(max_diff(t.d_tau, (-0.5 * p.A0) * s.tau) < 1e-13);
}

TEST_CASE("compressible tendency matches a finite-difference evaluation") {
  const PhysicalParams p = generic_params();
  double err[2];
  int idx = 0;
  for (int n : {32, 64}) {
    const GridSpec g = make_grid(2, n, 2.0 * kPi);
    const CompressibleState s = oblim::test::random_compressible(g, 0.5, 0.1, 41, 2);
    const TendencyParts spectral = compressible_tendency(s, p).total();
    const TendencyParts oracle = fd_compressible(s, p);
    err[idx++] = max_diff(spectral, oracle) / max_abs(spectral);
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) > 3.5);
}

TEST_CASE("compressible tendency in 3D matches the finite-difference evaluation") {
  const PhysicalParams p = generic_params();
  double err[2];
  int idx = 0;
  for (int n : {16, 32}) {
    const GridSpec g = make_grid(3, n, 2.0 * kPi);
    const CompressibleState s = oblim::test::random_compressible(g, 0.8, 0.05, 42, 1);
    err[idx++] = max_diff(compressible_tendency(s, p).total(), fd_compressible(s, p)) /
                 max_abs(compressible_tendency(s, p).total());
  }
  CHECK(std::log2(err[0] / err[1]) > 3.5);
}

TEST_CASE("stiff part is the constant-coefficient linearization") {
  const GridSpec g = make_grid(2, 32, 2.0 * kPi);
  const PhysicalParams p = generic_params();
  const CompressibleState s = oblim::test::random_compressible(g, 0.2, 0.1, 43);
  const Tendency t = compressible_tendency(s, p);
  const TendencyParts& L = t.stiff_linear;

  const double eps = s.epsilon;
  CHECK(max_diff(L.d_phi, (-1.0 / eps) * divergence(s.u)) < 1e-11);
  const VectorField grad_phi = gradient(s.phi);
  const VectorField grad_div = gradient(divergence(s.u));
  for (int i = 0; i < 2; ++i) {
    const Field want = (-p.a * p.gamma / eps) * grad_phi[i] + p.mu1 * laplacian(s.u[i]) + p.mu2 * grad_div[i];
    CHECK(max_diff(L.d_u[i], want) < 1e-11);
  }
  CHECK(max_diff(L.d_eta, p.nu * laplacian(s.eta)) < 1e-11);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(max_diff(L.d_tau.components[c], p.nu * laplacian(s.tau.components[c]) + (-0.5 * p.A0) * s.tau.components[c]) <
          1e-11);

  // The split sums to the whole.
  TendencyParts sum = t.stiff_linear;
  sum += t.nonstiff;
  CHECK(max_diff(sum, t.total()) == 0.0);
}

TEST_CASE("gamma = 2 has no acoustic residual") {
  const GridSpec g = make_grid(2, 16, 2.0 * kPi);
  PhysicalParams p;
  p.beta = 0.0;
  p.zbar = 0.0;
  CompressibleState s = CompressibleState::rest(g, 0.1);
  s.phi = sample(g, [](auto x) { return 0.5 * std::cos(x[0]); });
  // P'(rho)/rho = 2 exactly, so u only sees the linear pressure force.
  const Tendency t = compressible_tendency(s, p);
  CHECK(t.nonstiff.d_u.max_abs() < 1e-12);
}

TEST_CASE("invalid state is rejected by the tendency") {
  const GridSpec g = make_grid(2, 16, 1.0);
  CompressibleState s = CompressibleState::rest(g, 0.5);
  s.phi = Field(g, -2.0 / 0.5);
  CHECK_THROWS_AS(compressible_tendency(s, PhysicalParams{}), StateError);
}

TEST_CASE("incompressible tendency is divergence-free") {
  const GridSpec g = make_grid(2, 32, 2.0 * kPi);
  const PhysicalParams p = generic_params();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const IncompressibleState s = oblim::test::random_incompressible(g, 0.3, seed);
    const TendencyParts t = incompressible_tendency(s, p).total();
    CHECK(divergence(t.d_u).max_abs() < 1e-12);
    CHECK(t.d_phi.max_abs() == 0.0);
  }
  IncompressibleState bad = IncompressibleState::rest(g);
  bad.u[0] = sample(g, [](auto x) { return std::sin(x[0]); });
  CHECK_THROWS_AS(incompressible_tendency(bad, p), StateError);
}

TEST_CASE("incompressible tendency matches a convolution oracle") {
  // Navier-Stokes reduction (beta = 0) on 16^2; the advection term is built
  // from a direct convolution of Fourier coefficients.
  const GridSpec g = make_grid(2, 16, 2.0 * kPi);
  PhysicalParams p;
  p.beta = 0.0;
  p.mu1 = 0.3;

  IncompressibleState s = IncompressibleState::rest(g);
  const double A = 0.8;
  s.u[0] = sample(g, [&](auto x) { return A * std::sin(x[0]) * std::cos(x[1]); });
  s.u[1] = sample(g, [&](auto x) { return -A * std::cos(x[0]) * std::sin(x[1]); });
  Lcg64 gen(17);
  s.u += 0.2 * leray_project(random_band_limited_vector(g, gen, 3));

  using oblim::test::DirectDft2;
  const int n = g.n;
  const DirectDft2 u0 = oblim::test::direct_forward(s.u[0]);
  const DirectDft2 u1 = oblim::test::direct_forward(s.u[1]);
  const DirectDft2* uh[2] = {&u0, &u1};
  const double cut = (2.0 / 3.0) * (n / 2);
  auto kd = [&](int m) { return DirectDft2::signed_mode(m, n) == -n / 2 ? 0.0 : u0.wavenumber(m); };

  // (u.grad u)_i at mode q = sum_{a+b=q} u_j(a) * i k_j(b) u_i(b)
  DirectDft2 adv[2] = {{n, g.box_length, std::vector<std::complex<double>>(static_cast<std::size_t>(n * n))},
                       {n, g.box_length, std::vector<std::complex<double>>(static_cast<std::size_t>(n * n))}};
  const std::complex<double> I(0.0, 1.0);
  for (int a0 = 0; a0 < n; ++a0)
    for (int a1 = 0; a1 < n; ++a1)
      for (int b0 = 0; b0 < n; ++b0)
        for (int b1 = 0; b1 < n; ++b1) {
          const int q0 = (a0 + b0) % n, q1 = (a1 + b1) % n;
          const int sq0 = DirectDft2::signed_mode(a0, n) + DirectDft2::signed_mode(b0, n);
          const int sq1 = DirectDft2::signed_mode(a1, n) + DirectDft2::signed_mode(b1, n);
          if (std::abs(sq0) > cut || std::abs(sq1) > cut) continue;  // dealiased and unaliased
          const std::size_t ia = static_cast<std::size_t>(a0 * n + a1);
          const std::size_t ib = static_cast<std::size_t>(b0 * n + b1);
          for (int i = 0; i < 2; ++i) {
            const std::complex<double> grad_b = uh[0]->c[ia] * I * kd(b0) * uh[i]->c[ib] +
                                                uh[1]->c[ia] * I * kd(b1) * uh[i]->c[ib];
            adv[i].at(q0, q1) += grad_b;
          }
        }
  // Project -adv and add viscosity, mode by mode.
  DirectDft2 want[2] = {adv[0], adv[1]};
  for (int m0 = 0; m0 < n; ++m0)
    for (int m1 = 0; m1 < n; ++m1) {
      const double k0 = kd(m0), k1 = kd(m1);
      const double ksq_full = u0.wavenumber(m0) * u0.wavenumber(m0) + u0.wavenumber(m1) * u0.wavenumber(m1);
      const double ksq = k0 * k0 + k1 * k1;
      std::complex<double> f0 = -adv[0].at(m0, m1), f1 = -adv[1].at(m0, m1);
      if (ksq > 0.0) {
        const std::complex<double> kf = (k0 * f0 + k1 * f1) / ksq;
        f0 -= k0 * kf;
        f1 -= k1 * kf;
      }
      want[0].at(m0, m1) = f0 - p.mu1 * ksq_full * uh[0]->c[static_cast<std::size_t>(m0 * n + m1)];
      want[1].at(m0, m1) = f1 - p.mu1 * ksq_full * uh[1]->c[static_cast<std::size_t>(m0 * n + m1)];
    }
  const TendencyParts t = incompressible_tendency(s, p).total();
  for (int i = 0; i < 2; ++i) CHECK(max_diff(t.d_u[i], oblim::test::direct_inverse(want[i], g)) < 1e-10);
}

TEST_CASE("recombine_stress") {
  const GridSpec g = make_grid(2, 16, 1.0);
  PhysicalParams p;
  const SymTensorField zero(g);
  const SymTensorField id = recombine_stress(zero, Field(g, 1.0), p);
  CHECK(id.at(0, 0).max_abs() == 1.0);
  CHECK(id.at(1, 1).max_abs() == 1.0);
  CHECK(id.at(0, 1).max_abs() == 0.0);
  CHECK(recombine_stress(zero, Field(g, 0.0), p).max_abs() == 0.0);

  p.k = 1.7;
  Lcg64 gen(6);
  const SymTensorField tau = random_band_limited_tensor(g, gen);
  const Field eta = Field(g, 1.0) + 0.2 * random_band_limited(g, gen);
  SymTensorField back = recombine_stress(tau, eta, p);
  for (int i = 0; i < 2; ++i)
    for (std::size_t x = 0; x < eta.size(); ++x) back.at(i, i)[x] -= p.k * eta[x];
  CHECK(max_diff(back, tau) < 1e-15);
  CHECK_THROWS_AS(recombine_stress(tau, Field(make_grid(2, 8, 1.0)), p), DomainError);
}

TEST_CASE("validate_state messages") {
  const GridSpec g = make_grid(2, 16, 1.0);
  CompressibleState s = CompressibleState::rest(g, 0.5);
  CHECK(validate_state(s).empty());
  s.phi = Field(g, -2.0 / 0.5);
  auto v = validate_state(s);
  REQUIRE(!v.empty());
  CHECK(v.front() == "density non-positive");

  s = CompressibleState::rest(g, 0.5);
  s.eta[7] = -0.1;
  v = validate_state(s);
  REQUIRE(v.size() == 1);
  CHECK(v.front() == "polymer density negative");
  s.eta[7] = -1e-13;
  CHECK(validate_state(s).empty());

  s = CompressibleState::rest(g, 0.5);
  s.u[1][0] = std::nan("");
  CHECK(validate_state(s).front() == "non-finite values");

  IncompressibleState t = IncompressibleState::rest(g);
  CHECK(validate_state(t).empty());
  t.u[0] = sample(g, [](auto x) { return std::sin(2.0 * kPi * x[0]); });
  CHECK(validate_state(t).front() == "velocity not divergence-free");
}

}  // TEST_SUITE
