#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pbrom/boundary.hpp"
#include "pbrom/bspline.hpp"
#include "pbrom/coefficient_maps.hpp"
#include "pbrom/config.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/deim.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/io.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/operator.hpp"
#include "pbrom/rom.hpp"

using namespace pbrom;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

struct Setup {
  GridSpec g;
  MoleculeModel mol;
  ParametricOperator op;
  BoundaryGenerator bgen;
  TrainingSet train;
  DeimModel deim;
  GreedyResult res;
};

Setup build_setup() {
  Setup s;
  s.g.n = 9;
  s.g.box_length = 16.0;
  const PhysicalConstants pc = build_constants(298.15);
  s.mol.atoms.push_back({{0.0, 0.0, 0.0}, 1.0, 2.5});
  s.mol.atoms.push_back({{2.0, 1.0, -1.0}, -0.5, 1.8});
  s.mol.atoms.push_back({{-1.5, -2.0, 1.0}, 0.7, 2.1});
  const CoefficientMaps maps =
      build_coefficient_maps(s.mol, s.g, 2.0, 78.54, 0.3, 2.0);
  const SourceField src = spread_charges(s.mol, s.g, pc);
  s.op = assemble_operator(s.g, maps, src, pc);
  s.bgen = BoundaryGenerator(s.mol, pc, 78.54);
  s.train = make_training_set(0.05, 0.15, 7);
  const auto snap = build_snapshots_b(s.op, s.bgen, s.train.samples);
  s.deim = DeimModel(pod_truncate(snap.F, 1e-8), s.op);
  GreedyOptions opt;
  opt.eps_tol = 1e-4;
  opt.max_N = 5;
  s.res = greedy_build(s.op, s.bgen, s.train, s.deim, opt);
  return s;
}

RomBundle bundle_of(const Setup& s, bool with_lift) {
  RomBundle b;
  b.grid = s.g;
  b.temperature = 298.15;
  b.eps_solvent = 78.54;
  b.molecule = s.mol;
  b.train = s.train;
  b.basis = s.res.basis;
  b.model = s.res.model;
  b.deim = s.deim;
  b.with_lift = with_lift;
  return b;
}

}  // namespace

TEST_CASE("nodal field containers round-trip bit exactly", "[io]") {
  GridSpec g;
  g.n = 7;
  g.box_length = 12.5;
  g.center = {1.0, -2.0, 0.25};
  Array3 field(7, 7, 7);
  for (std::size_t q = 0; q < field.size(); ++q) {
    field.data()[q] = std::sin(static_cast<double>(q)) * 1e3;
  }
  std::stringstream buf;
  write_grid_container(buf, g, field);
  auto [g2, f2] = read_grid_container(buf);
  CHECK(g2.n == g.n);
  CHECK(g2.box_length == g.box_length);
  CHECK(g2.center == g.center);
  REQUIRE(f2.size() == field.size());
  for (std::size_t q = 0; q < field.size(); ++q) {
    CHECK(f2.data()[q] == field.data()[q]);
  }
  // A rewrite of what was read reproduces the original bytes.
  std::stringstream buf2;
  write_grid_container(buf2, g2, f2);
  std::stringstream buf3;
  write_grid_container(buf3, g, field);
  CHECK(buf2.str() == buf3.str());
}

TEST_CASE("nodal field containers reject malformed streams", "[io]") {
  SECTION("wrong magic") {
    std::stringstream buf("NOPE this is not a container");
    CHECK_THROWS_MATCHES(read_grid_container(buf), io_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("bad magic")));
  }
  SECTION("future version is refused cleanly") {
    GridSpec g;
    g.n = 3;
    g.box_length = 2.0;
    Array3 f(3, 3, 3);
    std::stringstream buf;
    write_grid_container(buf, g, f);
    std::string bytes = buf.str();
    bytes[4] = 9;  // bump the version field
    std::stringstream bad(bytes);
    CHECK_THROWS_MATCHES(
        read_grid_container(bad), io_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("unsupported")));
  }
  SECTION("truncation") {
    GridSpec g;
    g.n = 5;
    g.box_length = 4.0;
    Array3 f(5, 5, 5);
    std::stringstream buf;
    write_grid_container(buf, g, f);
    const std::string whole = buf.str();
    std::stringstream cut(whole.substr(0, whole.size() / 2));
    CHECK_THROWS_MATCHES(
        read_grid_container(cut), io_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("unexpected end")));
  }
  SECTION("shape mismatch on write") {
    GridSpec g;
    g.n = 5;
    g.box_length = 4.0;
    Array3 wrong(4, 5, 5);
    std::stringstream buf;
    CHECK_THROWS_AS(write_grid_container(buf, g, wrong), io_error);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(read_grid_container_file("/nonexistent-dir/x.pbgr"),
                    io_error);
    GridSpec g;
    g.n = 3;
    g.box_length = 2.0;
    CHECK_THROWS_AS(
        write_grid_container_file("/nonexistent-dir/x.pbgr", g, Array3(3, 3, 3)),
        io_error);
  }
}

TEST_CASE("reduced-model containers round-trip", "[io]") {
  const Setup s = build_setup();
  const RomBundle b = bundle_of(s, true);

  std::stringstream buf;
  write_rom_container(buf, b);
  const RomBundle r = read_rom_container(buf);

  CHECK(r.grid.n == b.grid.n);
  CHECK(r.grid.box_length == b.grid.box_length);
  CHECK(r.grid.center == b.grid.center);
  CHECK(r.temperature == b.temperature);
  CHECK(r.eps_solvent == b.eps_solvent);
  CHECK(r.with_lift);
  REQUIRE(r.molecule.atoms.size() == b.molecule.atoms.size());
  for (std::size_t i = 0; i < b.molecule.atoms.size(); ++i) {
    CHECK(r.molecule.atoms[i].position == b.molecule.atoms[i].position);
    CHECK(r.molecule.atoms[i].charge == b.molecule.atoms[i].charge);
    CHECK(r.molecule.atoms[i].radius == b.molecule.atoms[i].radius);
  }
  CHECK(r.train.samples == b.train.samples);
  CHECK(r.train.lo == b.model.d_lo);
  CHECK(r.train.hi == b.model.d_hi);
  CHECK(r.model.selected_mus == b.model.selected_mus);
  CHECK(r.model.d_lo == b.model.d_lo);
  CHECK(r.model.d_hi == b.model.d_hi);
  CHECK((r.model.A1h - b.model.A1h).norm() == 0.0);
  CHECK((r.model.A2h - b.model.A2h).norm() == 0.0);
  CHECK((r.model.rhoh - b.model.rhoh).norm() == 0.0);
  CHECK((r.model.deim_block - b.model.deim_block).norm() == 0.0);
  CHECK(r.deim.r() == b.deim.r());
  CHECK(r.deim.rstar() == b.deim.rstar());
  CHECK(r.deim.indices() == b.deim.indices());
  CHECK((r.deim.singular_values() - b.deim.singular_values()).norm() == 0.0);
  CHECK(r.deim.sample_coeffs() == b.deim.sample_coeffs());
  CHECK(r.deim.sample_nodes() == b.deim.sample_nodes());
  CHECK((r.basis.V - b.basis.V).norm() == 0.0);
  CHECK((r.deim.basis() - b.deim.basis().leftCols(b.deim.rstar())).norm() ==
        0.0);

  SECTION("a second write reproduces the bytes") {
    std::stringstream again;
    write_rom_container(again, r);
    std::stringstream original;
    write_rom_container(original, b);
    CHECK(again.str() == original.str());
  }

  SECTION("the reloaded model solves identically") {
    const PhysicalConstants pc = build_constants(r.temperature);
    const BoundaryGenerator bgen(r.molecule, pc, r.eps_solvent);
    for (const double mu : {0.05, 0.11, 0.15}) {
      const Vector u0 = rom_solve(b.model, b.deim, s.bgen, mu);
      const Vector u1 = rom_solve(r.model, r.deim, bgen, mu);
      CHECK((u1 - u0).norm() <= 1e-14 * u0.norm());
    }
  }

  SECTION("the reloaded lifted basis reconstructs fields") {
    const Vector uN = rom_solve(r.model, r.deim, s.bgen, 0.1);
    const Vector lifted = r.basis.V * uN;
    const Vector ref = s.res.basis.V * rom_solve(b.model, b.deim, s.bgen, 0.1);
    CHECK((lifted - ref).norm() <= 1e-13 * ref.norm());
  }
}

TEST_CASE("reduced-model containers honor the no-lift flag", "[io]") {
  const Setup s = build_setup();
  const RomBundle b = bundle_of(s, false);
  std::stringstream buf;
  write_rom_container(buf, b);
  const RomBundle r = read_rom_container(buf);
  CHECK(!r.with_lift);
  CHECK(!r.deim.has_lift());
  CHECK(r.basis.V.size() == 0);
  // Online solves never need the lift.
  for (const double mu : {0.05, 0.15}) {
    const Vector u0 = rom_solve(b.model, b.deim, s.bgen, mu);
    const Vector u1 = rom_solve(r.model, r.deim, s.bgen, mu);
    CHECK((u1 - u0).norm() <= 1e-14 * u0.norm());
  }
  // Lift-dependent operations fail loudly.
  CHECK_THROWS_MATCHES(r.deim.coefficients(Vector::Ones(r.deim.r())),
                       assembly_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("lifted basis")));
  // The no-lift container is much smaller than the lifted one.
  std::stringstream lifted;
  write_rom_container(lifted, bundle_of(s, true));
  CHECK(buf.str().size() < lifted.str().size() / 2);
}

TEST_CASE("reduced-model containers reject malformed streams", "[io]") {
  const Setup s = build_setup();
  std::stringstream buf;
  write_rom_container(buf, bundle_of(s, true));
  const std::string whole = buf.str();

  SECTION("wrong magic") {
    std::string bytes = whole;
    bytes[0] = 'X';
    std::stringstream bad(bytes);
    CHECK_THROWS_MATCHES(read_rom_container(bad), io_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("bad magic")));
  }
  SECTION("newer version") {
    std::string bytes = whole;
    bytes[4] = 2;
    std::stringstream bad(bytes);
    CHECK_THROWS_MATCHES(
        read_rom_container(bad), io_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("unsupported")));
  }
  SECTION("truncation at several depths") {
    for (const std::size_t keep :
         {std::size_t{10}, std::size_t{60}, whole.size() / 2,
          whole.size() - 8}) {
      std::stringstream cut(whole.substr(0, keep));
      CHECK_THROWS_AS(read_rom_container(cut), io_error);
    }
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(read_rom_container_file("/nonexistent-dir/x.pbrm"),
                    io_error);
  }
}

TEST_CASE("history CSV layout", "[io]") {
  std::vector<GreedyHistoryRow> rows(2);
  rows[0].iteration = 1;
  rows[0].mu_star = 0.05;
  rows[0].delta_max = 0.5;
  rows[0].true_err_max = std::numeric_limits<double>::quiet_NaN();
  rows[1].iteration = 2;
  rows[1].mu_star = 0.075;
  rows[1].delta_max = 0.001234;
  rows[1].true_err_max = 0.0005;

  std::ostringstream out;
  write_history_csv(out, rows);
  const auto lines = split_lines(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "iteration,mu_star,delta_max,true_err_max");

  const auto f1 = split_fields(lines[1]);
  REQUIRE(f1.size() == 4);
  CHECK(f1[0] == "1");
  CHECK(std::stod(f1[1]) == 0.05);
  CHECK(std::stod(f1[2]) == 0.5);
  CHECK(f1[3].empty());  // NaN prints as an empty field

  const auto f2 = split_fields(lines[2]);
  REQUIRE(f2.size() == 4);
  CHECK(f2[0] == "2");
  CHECK(std::stod(f2[1]) == 0.075);
  CHECK(std::stod(f2[2]) == 0.001234);
  CHECK(std::stod(f2[3]) == 0.0005);

  SECTION("empty history is just the header") {
    std::ostringstream empty;
    write_history_csv(empty, {});
    CHECK(empty.str() == "iteration,mu_star,delta_max,true_err_max\n");
  }
}

TEST_CASE("singular-value CSV layout", "[io]") {
  Vector sigma(3);
  sigma << 2.5, 0.25, 1.25e-9;
  std::ostringstream out;
  write_singular_values_csv(out, sigma);
  const auto lines = split_lines(out.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "index,sigma");
  for (int i = 0; i < 3; ++i) {
    const auto f = split_fields(lines[static_cast<std::size_t>(i + 1)]);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == std::to_string(i + 1));
    CHECK(std::stod(f[1]) == sigma[i]);
  }
}

TEST_CASE("key-value streams parse into a map", "[config]") {
  std::istringstream in(
      "# full-line comment\n"
      "\n"
      "  n = 33   \n"
      "face-mode=harmonic # trailing comment\n"
      "mu = 0.1\n"
      "mu = 0.2\n");
  const auto kv = parse_key_value_stream(in, "test.cfg");
  CHECK(kv.size() == 3);
  CHECK(kv.at("n") == "33");
  CHECK(kv.at("face-mode") == "harmonic");
  CHECK(kv.at("mu") == "0.2");  // later occurrences win

  SECTION("missing separator names the line") {
    std::istringstream bad("n = 9\nbogus line\n");
    CHECK_THROWS_MATCHES(
        parse_key_value_stream(bad, "f.cfg"), parse_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("f.cfg:2")));
  }
  SECTION("empty keys are rejected") {
    std::istringstream bad(" = 1\n");
    CHECK_THROWS_MATCHES(parse_key_value_stream(bad, "f.cfg"), parse_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("empty key")));
  }
}

TEST_CASE("config keys map onto the run settings", "[config]") {
  RunConfig cfg;
  apply_config_keys(cfg, {{"pqr", "mol.pqr"},
                          {"n", "129"},
                          {"box-length", "32.5"},
                          {"center", "1.0, -2.0, 0.5"},
                          {"eps-in", "1"},
                          {"face-mode", "harmonic"},
                          {"solver-max-iter", "500"},
                          {"precon", "jacobi"},
                          {"mu", "0.12"},
                          {"d-hi", "0.3"},
                          {"train-count", "21"},
                          {"track-true-error", "yes"},
                          {"with-lift", "off"},
                          {"out-field", "u.pbgr"},
                          {"slice-axis", "0"},
                          {"slice-index", "64"}});
  CHECK(cfg.pqr_path == "mol.pqr");
  CHECK(cfg.n == 129);
  CHECK(cfg.box_length == 32.5);
  CHECK(!cfg.center_auto);
  CHECK(cfg.center == std::array<double, 3>{1.0, -2.0, 0.5});
  CHECK(cfg.eps_in == 1.0);
  CHECK(cfg.eps_out == 78.54);  // untouched default
  CHECK(cfg.face_mode == "harmonic");
  CHECK(cfg.solver_max_iter == 500);
  CHECK(cfg.precon == "jacobi");
  CHECK(cfg.mu == 0.12);
  CHECK(cfg.d_hi == 0.3);
  CHECK(cfg.train_count == 21);
  CHECK(cfg.track_true_error);
  CHECK(!cfg.with_lift);
  CHECK(cfg.out_field == "u.pbgr");
  CHECK(cfg.slice_axis == 0);
  CHECK(cfg.slice_index == 64);

  SECTION("unknown keys are fatal") {
    CHECK_THROWS_MATCHES(
        apply_config_keys(cfg, {{"nn", "9"}}), parse_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("unknown config key 'nn'")));
  }
  SECTION("bad values carry the key name") {
    CHECK_THROWS_MATCHES(
        apply_config_keys(cfg, {{"eps-in", "abc"}}), parse_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("eps-in")));
    CHECK_THROWS_AS(apply_config_keys(cfg, {{"n", "1e2"}}), parse_error);
    CHECK_THROWS_AS(apply_config_keys(cfg, {{"track-true-error", "maybe"}}),
                    parse_error);
    CHECK_THROWS_AS(apply_config_keys(cfg, {{"center", "1,2"}}), parse_error);
    CHECK_THROWS_AS(apply_config_keys(cfg, {{"center", "1,2,3,4"}}),
                    parse_error);
  }
  SECTION("boolean spellings") {
    for (const char* t : {"true", "1", "yes", "on"}) {
      RunConfig c;
      apply_config_keys(c, {{"track-true-error", t}});
      CHECK(c.track_true_error);
    }
    for (const char* f : {"false", "0", "no", "off"}) {
      RunConfig c;
      c.track_true_error = true;
      apply_config_keys(c, {{"track-true-error", f}});
      CHECK(!c.track_true_error);
    }
  }
}

TEST_CASE("range validation of run settings", "[config]") {
  RunConfig ok;
  CHECK_NOTHROW(validate_config(ok));

  auto expect_reject = [](auto&& mutate, const std::string& needle) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_MATCHES(validate_config(c), parse_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring(needle)));
  };
  expect_reject([](RunConfig& c) { c.n = 8; }, "odd");
  expect_reject([](RunConfig& c) { c.n = 7; }, "at least 9");
  expect_reject([](RunConfig& c) { c.box_length = -1.0; }, "box-length");
  expect_reject([](RunConfig& c) { c.eps_in = 0.0; }, "dielectric");
  expect_reject([](RunConfig& c) { c.eps_out = -3.0; }, "dielectric");
  expect_reject([](RunConfig& c) { c.temperature = 0.0; }, "temperature");
  expect_reject([](RunConfig& c) { c.stern_radius = -0.1; }, "stern-radius");
  expect_reject([](RunConfig& c) { c.spline_window = 0.0; }, "spline-window");
  expect_reject([](RunConfig& c) { c.face_mode = "linear"; }, "face-mode");
  expect_reject([](RunConfig& c) { c.solver_tol = 0.0; }, "solver-tol");
  expect_reject([](RunConfig& c) { c.solver_tol = 1.5; }, "solver-tol");
  expect_reject([](RunConfig& c) { c.solver_max_iter = -1; },
                "solver-max-iter");
  expect_reject([](RunConfig& c) { c.precon = "ilu"; }, "precon");
  expect_reject([](RunConfig& c) { c.mu = -0.01; }, "mu");
  expect_reject([](RunConfig& c) { c.d_lo = 0.2; }, "d-lo");
  expect_reject([](RunConfig& c) { c.d_lo = -0.1; }, "d-lo");
  expect_reject([](RunConfig& c) { c.train_count = 1; }, "train-count");
  expect_reject([](RunConfig& c) { c.eps_tol = 0.0; }, "eps-tol");
  expect_reject([](RunConfig& c) { c.eps_svd = 1.0; }, "eps-svd");
  expect_reject([](RunConfig& c) { c.max_basis = 0; }, "max-basis");
  expect_reject([](RunConfig& c) { c.slice_axis = 3; }, "slice-axis");
}

TEST_CASE("the box must cover the molecule", "[config]") {
  MoleculeModel m;
  m.atoms.push_back({{0.0, 0.0, 0.0}, 1.0, 3.0});
  CHECK(molecule_extent(m) == 6.0);
  m.atoms.push_back({{4.0, 0.0, 0.0}, -1.0, 2.0});
  CHECK(molecule_extent(m) == 9.0);  // x spans [-3, 6]

  RunConfig cfg;
  cfg.box_length = 5.0;
  CHECK_THROWS_MATCHES(
      check_box_covers(cfg, m), parse_error,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("does not cover")));
  cfg.box_length = 9.0;  // equality still fails: strict cover
  CHECK_THROWS_AS(check_box_covers(cfg, m), parse_error);
  cfg.box_length = 9.5;
  CHECK_NOTHROW(check_box_covers(cfg, m));
  cfg.box_length = 0.0;  // auto-sized later
  CHECK_NOTHROW(check_box_covers(cfg, m));
}

TEST_CASE("config files load and apply", "[config]") {
  const std::string path = "config_load_test.cfg";
  {
    std::ofstream out(path);
    out << "# test configuration\n"
        << "n = 17\n"
        << "mu = 0.125\n"
        << "precon = jacobi\n";
  }
  RunConfig cfg;
  load_config_file(cfg, path);
  std::remove(path.c_str());
  CHECK(cfg.n == 17);
  CHECK(cfg.mu == 0.125);
  CHECK(cfg.precon == "jacobi");
  CHECK_THROWS_MATCHES(
      load_config_file(cfg, "/nonexistent-dir/none.cfg"), parse_error,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("cannot open config file")));
}

TEST_CASE("settings translate to solver and map options", "[config]") {
  RunConfig cfg;
  CHECK(face_mode_of(cfg) == FaceSampling::midpoint);
  cfg.face_mode = "harmonic";
  CHECK(face_mode_of(cfg) == FaceSampling::harmonic);

  cfg.solver_tol = 1e-8;
  cfg.solver_max_iter = 321;
  cfg.precon = "jacobi";
  const PcgOptions opt = solver_options_of(cfg);
  CHECK(opt.tol == 1e-8);
  CHECK(opt.max_iter == 321);
  CHECK(opt.precon == PreconKind::jacobi);
  cfg.precon = "ssor";
  CHECK(solver_options_of(cfg).precon == PreconKind::ssor);
}
