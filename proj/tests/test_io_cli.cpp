#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fiberot/cli.hpp"
#include "fiberot/error.hpp"
#include "fiberot/generate.hpp"
#include "fiberot/io.hpp"
#include "fiberot/reproductions.hpp"
#include "support.hpp"

using namespace fiberot;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fiberot_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = scratch(name);
  std::ofstream(path) << text;
  return path;
}

fs::path fixture(const std::string& name) { return fs::path(FIBEROT_FIXTURES) / name; }

ErrorCode parse_code(const std::string& text) {
  try {
    parse_instance(Json::parse(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NumericalFailure;
}

}  // namespace

TEST_CASE("parse the shared-fiber layout") {
  const auto inst = parse_instance(Json::parse(R"({
    "base": [{"id": "u", "sigma": 1}, {"id": "v", "sigma": 3}],
    "points": [0, 1, 2],
    "relabelings": {"v": [2, 1, 0]},
    "measures": {
      "m": {"u": [{"point": 0, "w": 1}], "v": [{"point": 1, "w": 1}, {"point": 2, "w": 1}]}
    },
    "reference": {"u": 1, "v": 2}
  })"));
  CHECK(inst.bundle.base_count() == 2);
  CHECK(inst.bundle.cost(0)(0, 2) == Approx(2.0));
  const auto& m = inst.measure("m");
  CHECK(m.sigma()[1] == Approx(0.75));
  CHECK(m.fiber(1)->weight_of(2) == Approx(0.5));
  REQUIRE(inst.reference.has_value());
  CHECK(inst.reference->indices == std::vector<int>{1, 2});
  CHECK_THROWS_AS(inst.measure("missing"), Error);
}

TEST_CASE("parse the per-fiber layout with explicit supports") {
  const auto inst = parse_instance(Json::parse(R"({
    "base": [{"id": "w1", "sigma": 0.5}, {"id": "w2", "sigma": 0.5}],
    "fibers": {
      "w1": {"points": [[0, 0], [3, 4]], "support": [1],
             "measures": {"a": [{"point": 0, "w": 2}]}},
      "w2": {"cost": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
             "measures": {"a": [{"point": 2, "w": 1}]}}
    }
  })"));
  CHECK(inst.bundle.cost(0)(0, 1) == Approx(5.0));
  CHECK(inst.bundle.cost(1).size() == 3);
  CHECK(inst.support[0] == std::vector<int>{1});
  CHECK(inst.support[1] == std::vector<int>{0, 1, 2});
  CHECK(inst.measure("a").fiber(0)->weight_of(0) == 1.0);
}

TEST_CASE("parse errors carry codes") {
  CHECK(parse_code(R"({"measures": {}})") == ErrorCode::ParseError);
  CHECK(parse_code(R"({"cost": [[0, 1], [1, 0]], "measures": {"a": [{"point": 5, "w": 1}]}})") ==
        ErrorCode::SupportOutOfRange);
  CHECK(parse_code(R"({"cost": [[0, 1], [1, 0]], "measures": {"a": [{"point": 0, "w": -1}]}})") ==
        ErrorCode::NegativeWeight);
  CHECK(parse_code(R"({"cost": [[0, 1], [2, 0]], "measures": {"a": [{"point": 0, "w": 1}]}})") ==
        ErrorCode::InvalidCost);
  CHECK(parse_code(R"({"cost": [[0, 1], [1, 0]], "measures": {"a": [{"pt": 0, "w": 1}]}})") ==
        ErrorCode::ParseError);
  try {
    parse_instance(Json::parse(R"({"cost": [[0, 1], [1, 0]], "measures": {"a": [{"point": "x", "w": 1}]}})"));
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("measures") != std::string::npos);
  }
}

TEST_CASE("instance JSON round-trips") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    GenerateSpec spec;
    spec.seed = seed;
    spec.fibers = 3;
    spec.measures = 3;
    spec.dimension = seed == 2 ? 2 : 1;
    const auto inst = generate_instance(spec);
    const auto again = parse_instance(instance_to_json(inst));
    CHECK(again.names == inst.names);
    for (std::size_t i = 0; i < inst.measures.size(); ++i) {
      CHECK(disintegrated_distance(inst.bundle, inst.measures[i], again.measures[i],
                                   DisintConfig(1, 1)) <= 1e-11);
    }
    CHECK(dump_report(instance_to_json(again)) == dump_report(instance_to_json(inst)));
  }
}

TEST_CASE("CSV instances") {
  const auto a = write_file("a.csv", "x,weight\n0,1\n2,3\n");
  const auto b = write_file("b.csv", "# shifted\n1.0, 1\n");
  const auto inst = load_csv_instance({a, b});
  CHECK(inst.names == std::vector<std::string>{"a", "b"});
  CHECK(inst.bundle.cost(0).size() == 3);
  CHECK(mk_distance(*inst.measures[0].fiber(0), *inst.measures[1].fiber(0), inst.bundle.cost(0), 1.0) ==
        Approx(0.25 * 1 + 0.75 * 1));
  const auto bad = write_file("bad.csv", "0,1\nfoo,bar\n");
  CHECK_THROWS_AS(load_csv_instance({bad}), Error);
}

TEST_CASE("certificate JSON round-trips") {
  Rng rng(1);
  const auto problem = testing::random_problem(rng, 3, 2, 4, 3, 2.0, 2.0);
  const auto result = disint_barycenter(problem);
  const auto cert = extract_certificate(problem, result);
  const auto again = certificate_from_json(Json::parse(certificate_to_json(cert, problem).dump()), problem);
  CHECK(eval_dual(again, problem) == Approx(eval_dual(cert, problem)).epsilon(1e-12));
  CHECK_THROWS_AS(certificate_from_json(Json::parse(R"({"zeta": 3})"), problem), Error);
}

TEST_CASE("twelve significant digits") {
  CHECK(round_significant(0.1234567890123456) == 0.123456789012);
  CHECK(round_significant(0.0) == 0.0);
  const auto doc = rounded(Json{{"a", 1.0 / 3.0}, {"b", std::numeric_limits<double>::infinity()}});
  CHECK(doc["a"].get<double>() == 0.333333333333);
  CHECK(doc["b"] == "inf");
  CHECK(dump_report(Json{{"x", 1}}).back() == '\n');
}

TEST_CASE("generate is deterministic and matches the golden hash") {
  const auto first = run({"generate", "--seed", "0", "--fibers", "2", "--atoms", "3"});
  REQUIRE(first.code == kExitOk);
  CHECK(fnv1a(first.out) == 0x23371a7370cba584ULL);
  CHECK(run({"generate", "--seed", "0", "--fibers", "2", "--atoms", "3"}).out == first.out);
  CHECK(run({"generate", "--seed", "1", "--fibers", "2", "--atoms", "3"}).out != first.out);
  CHECK(run({"generate", "--oracle-checkable", "--atoms", "5"}).code == kExitInvalid);
  CHECK(run({"generate", "--oracle-checkable", "--atoms", "4"}).code == kExitOk);
}

TEST_CASE("cli ot and dist") {
  const auto two = fixture("two_dirac.json").string();
  const auto ot = run({"--p", "2", "ot", "--mu", "a", "--nu", "b", two});
  REQUIRE(ot.code == kExitOk);
  CHECK(Json::parse(ot.out)["value_p"].get<double>() == 4.0);
  const auto same = run({"dist", "--m", "a", "--n", "a", two});
  CHECK(Json::parse(same.out)["distance"].get<double>() == 0.0);

  const auto gen = scratch("gen.json");
  REQUIRE(run({"generate", "--seed", "4", "-o", gen.string()}).code == kExitOk);
  const auto inst = load_instance(gen);
  const auto dist = run({"--p", "2", "--q", "inf", "dist", "--m", "a", "--n", "b", gen.string()});
  REQUIRE(dist.code == kExitOk);
  CHECK(Json::parse(dist.out)["distance"].get<double>() ==
        Approx(disintegrated_distance(inst.bundle, inst.measures[0], inst.measures[1],
                                      DisintConfig(2.0, DisintConfig::kInfinity))));
  const auto csv = run({"--format", "csv", "dist", "--m", "a", "--n", "b", gen.string()});
  CHECK(csv.out.rfind("quantity,base_id,value\n", 0) == 0);
}

TEST_CASE("cli barycenters and certificates") {
  const auto gen = scratch("bary.json");
  REQUIRE(run({"generate", "--seed", "7", "--measures", "3", "-o", gen.string()}).code == kExitOk);
  const auto exact = run({"--p", "2", "disint-bary", gen.string()});
  REQUIRE(exact.code == kExitOk);
  const auto report = Json::parse(exact.out);
  CHECK(report["method"] == "lp-per-fiber");
  CHECK(report.contains("minimizer"));

  const auto sub = run({"--p", "2", "--q", "4", "disint-bary", gen.string()});
  CHECK(sub.code == kExitOk);
  CHECK(Json::parse(sub.out)["method"] == "subgradient");

  const auto certify = run({"--p", "2", "certify", gen.string()});
  REQUIRE(certify.code == kExitOk);
  const auto gap = Json::parse(certify.out);
  CHECK(gap["gap"].get<double>() <= 1e-7);

  // Feeding the emitted certificate back in reproduces the same gap.
  const auto cert_path = write_file("cert.json", gap["certificate"].dump());
  const auto again = run({"--p", "2", "certify", "--certificate", cert_path.string(), gen.string()});
  CHECK(again.code == kExitOk);
  CHECK(Json::parse(again.out)["dual"].get<double>() == Approx(gap["dual"].get<double>()));

  auto negative = gap["certificate"];
  negative["zeta"]["0"]["w1"] = -1.0;
  const auto bad_path = write_file("bad_cert.json", negative.dump());
  CHECK(run({"--p", "2", "certify", "--certificate", bad_path.string(), gen.string()}).code ==
        kExitUncertified);
}

TEST_CASE("cli examples") {
  const auto two = run({"example", "two-interval", "--n", "20"});
  REQUIRE(two.code == kExitOk);
  const auto r = Json::parse(two.out);
  CHECK(std::abs(r["primal"].get<double>() - 1.5) <= 0.02);
  CHECK(std::abs(r["dual"].get<double>() - 1.5) <= 0.02);
  CHECK(run({"example", "2.2", "--n", "20"}).out == two.out);

  const auto split = run({"example", "split-base"});
  REQUIRE(split.code == kExitOk);
  CHECK(Json::parse(split.out)["minimizers"].size() >= 2);
  CHECK(run({"example", "nope"}).code == kExitInvalid);
}

TEST_CASE("cli probe-uniqueness") {
  const auto gen = scratch("probe.json");
  REQUIRE(run({"generate", "--seed", "9", "-o", gen.string()}).code == kExitOk);
  const auto probe = run({"--p", "2", "probe-uniqueness", "--trials", "3", gen.string()});
  REQUIRE(probe.code == kExitOk);
  CHECK(Json::parse(probe.out)["trials"] == 3);
}

TEST_CASE("cli validation failures exit with 2") {
  const auto two = fixture("two_dirac.json").string();
  CHECK(run({"--p", "0.5", "ot", "--mu", "a", "--nu", "b", two}).code == kExitInvalid);
  CHECK(run({"--p", "2", "--q", "1", "dist", "--m", "a", "--n", "b", two}).code == kExitInvalid);
  CHECK(run({"ot", "--mu", "a", "--nu", "zzz", two}).code == kExitInvalid);
  CHECK(run({"--bogus"}).code == kExitInvalid);
  CHECK(run({"dist", "--m", "a", "--n", "b", scratch("missing.json").string()}).code == kExitInvalid);
  const auto broken = write_file("broken.json", "{\"cost\": [[0, 1], [1, 0]");
  const auto r = run({"dist", "--m", "a", "--n", "b", broken.string()});
  CHECK(r.code == kExitInvalid);
  CHECK(!r.err.empty());
}

TEST_CASE("reports are byte-identical across runs") {
  const auto gen = scratch("det.json");
  REQUIRE(run({"generate", "--seed", "11", "-o", gen.string()}).code == kExitOk);
  const std::vector<std::string> args{"--p", "2", "--q", "4", "--seed", "3", "probe-uniqueness",
                                      "--trials", "2", gen.string()};
  CHECK(run(args).out == run(args).out);
}
