#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pluri/io.hpp"
#include "support.hpp"

using namespace pluri;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pluri-io-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (int trial = 0; trial < 1000; ++trial) {
    auto rng = gen::rng_for(trial, 100);
    const double x = gen::uniform(rng, -1, 1) * std::pow(10.0, gen::integer(rng, -300, 300));
    CHECK(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(kInf) == "inf");
  CHECK(io::format_double(-kInf) == "-inf");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("primal, dual and curve dumps round-trip") {
  const auto d = Discretization::standard(SlopeBody::interval(0, 1));
  const Potential u = preset_potential("half_body", {}, d);
  io::write_primal(scratch("u.bin"), u.primal());
  const PrimalPotential up = io::read_primal(scratch("u.bin"), d.dual.body());
  CHECK(up.values == u.primal().values);
  CHECK(up.grid == u.primal().grid);
  CHECK(up.window.lo == u.primal().window.lo);
  CHECK(up.window.hi == u.primal().window.hi);
  CHECK(up.convex == u.primal().convex);

  io::write_dual(scratch("w.bin"), u.dual());
  const DualPotential w = io::read_dual(scratch("w.bin"), d.dual.body());
  CHECK(w.grid == u.dual().grid);
  for (std::size_t k = 0; k < w.values.size(); ++k) CHECK(w.values[k] == u.dual().values[k]);
  CHECK_THROWS_AS(io::read_dual(scratch("w.bin"), SlopeBody::interval(0, 2)), io::IoError);

  const PotentialCurve c = geodesic_segment(BigClass::toric(d).envelope(), preset_potential("entropy", {}, d), 4);
  io::write_curve(scratch("c.bin"), c);
  const PotentialCurve back = io::read_curve(scratch("c.bin"), d.dual);
  CHECK(back.times == c.times);
  CHECK(back.kind == c.kind);
  CHECK(back.lipschitz == c.lipschitz);
  CHECK(curve_distance(back, c) == 0.0);

  io::write_curve(scratch("c2.bin"), back);
  CHECK(slurp(scratch("c.bin")) == slurp(scratch("c2.bin")));
}

TEST_CASE("corrupt dumps are rejected") {
  { std::ofstream(scratch("bad.bin"), std::ios::binary) << "NOPE and some bytes"; }
  CHECK_THROWS_AS(io::read_primal(scratch("bad.bin"), SlopeBody::interval(0, 1)), io::IoError);
  CHECK_THROWS_AS(io::read_primal(scratch("missing.bin"), SlopeBody::interval(0, 1)), io::IoError);
  const auto d = Discretization::standard(SlopeBody::interval(0, 1));
  io::write_primal(scratch("trunc.bin"), BigClass::toric(d).envelope().primal());
  fs::resize_file(scratch("trunc.bin"), fs::file_size(scratch("trunc.bin")) - 8);
  CHECK_THROWS_AS(io::read_primal(scratch("trunc.bin"), SlopeBody::interval(0, 1)), io::IoError);
}

TEST_CASE("CSV tables use the fixed column orders") {
  const auto d = Discretization::standard(SlopeBody::interval(0, 1));
  const BigClass cls = BigClass::toric(d);
  const PotentialCurve c = geodesic_segment(cls.envelope(), preset_potential("entropy", {}, d), 4);
  io::write_curve_csv(scratch("curve.csv"), cls, c);
  CHECK(slurp(scratch("curve.csv")).rfind("t,energy,sup_to_V\n", 0) == 0);
  io::write_measure_csv(scratch("m.csv"), cls.envelope());
  CHECK(slurp(scratch("m.csv")).rfind("x,mass\n", 0) == 0);
  BetaSweepReport r;
  r.rows.push_back({1.0, 0.5, true, true, 0.1, 3, 1e-12});
  io::write_beta_csv(scratch("beta.csv"), r);
  const std::string beta = slurp(scratch("beta.csv"));
  CHECK(beta.rfind("beta,dist_to_envelope,monotone_ok,sign_ok,barrier_slack\n", 0) == 0);
  ComparisonTable t;
  t.rows.push_back({"disc", 1, 2, 0.5, 0.7, true, 2});
  io::write_comparison_csv(scratch("cmp.csv"), t);
  CHECK(slurp(scratch("cmp.csv")).rfind("E_id,cap_P1,cap_P2,T_P1,prop25_bound,prop25_ok,thm26_C\n", 0) == 0);
}
