#include "ptn/io.hpp"
#include "ptn/job.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace ptn;

namespace {

void expect_same(const TensorNetwork& a, const TensorNetwork& b) {
  ASSERT_EQ(a.vertex_ids(), b.vertex_ids());
  for (int id : a.vertex_ids()) {
    EXPECT_EQ(a.at(id).labels(), b.at(id).labels());
    EXPECT_EQ(a.at(id).dims(), b.at(id).dims());
    EXPECT_TRUE(a.at(id).data() == b.at(id).data());
  }
}

std::string parse_message(const std::string& text) {
  try {
    network_from_string(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

const char* kPair = R"({"format_version": 1,
  "vertices": [{"id": 0, "labels": [3], "sizes": [2], "data": [1, 2]},
               {"id": 1, "labels": [3], "sizes": [2], "data": [3, 4]}],
  "edges": [{"label": 3, "size": 2, "endpoints": [0, 1]}]})";

}  // namespace

TEST(NetworkFile, MinimalScalar) {
  TensorNetwork g = network_from_string(
      R"({"format_version": 1, "vertices": [{"id": 0, "labels": [], "sizes": [], "data": [2.5]}], "edges": []})");
  ASSERT_EQ(g.num_vertices(), 1u);
  EXPECT_EQ(g.at(0).order(), 0);
  EXPECT_EQ(g.at(0).value(), 2.5);
}

TEST(NetworkFile, PairContracts) {
  EXPECT_DOUBLE_EQ(network_from_string(kPair).contract().value(), 11.0);
}

TEST(NetworkFile, RoundTripIsBitwise) {
  TensorNetwork g = random_network(4, lattice_edges({2, 2}), 2, -0.7, 5);
  expect_same(g, network_from_string(network_to_string(g)));

  std::mt19937_64 rng(3);
  TensorNetwork open = testutil::build(testutil::random_spec(5, 2, 3, 3, rng), rng);
  const auto path = std::filesystem::temp_directory_path() / "ptn_round_trip.json";
  save_network(open, path.string());
  TensorNetwork back = load_network(path.string());
  std::filesystem::remove(path);
  expect_same(open, back);
  EXPECT_EQ(open.dangling(), back.dangling());
}

TEST(NetworkFile, MismatchedSizesRejected) {
  const char* text = R"({"format_version": 1,
    "vertices": [{"id": 0, "labels": [3], "sizes": [2], "data": [1, 2]},
                 {"id": 1, "labels": [3], "sizes": [3], "data": [1, 2, 3]}],
    "edges": [{"label": 3, "size": 2, "endpoints": [0, 1]}]})";
  EXPECT_THROW(network_from_string(text), ParseError);
}

TEST(NetworkFile, ErrorsNameTheField) {
  EXPECT_NE(parse_message(R"({"vertices": [], "edges": []})").find("format_version"), std::string::npos);
  EXPECT_NE(parse_message(R"({"format_version": 2, "vertices": [], "edges": []})").find("format_version"),
            std::string::npos);
  EXPECT_NE(parse_message(R"({"format_version": 1, "edges": []})").find("vertices"), std::string::npos);
  EXPECT_NE(parse_message(R"({"format_version": 1, "vertices": [{"id": 0, "labels": [1], "sizes": [2],
    "data": [1]}], "edges": []})").find("vertices[0]"), std::string::npos);
  EXPECT_NE(parse_message(R"({"format_version": 1, "vertices": [{"id": 0, "labels": [1], "sizes": [2, 2],
    "data": [1, 2]}], "edges": []})").find("sizes"), std::string::npos);
  EXPECT_NE(parse_message(R"({"format_version": 1, "vertices": [{"id": 0, "labels": [1], "sizes": [2],
    "data": [1, "x"]}], "edges": [{"label": 1, "size": 2, "endpoints": [0]}]})").find("data"), std::string::npos);
  auto j = nlohmann::json::parse(kPair);
  j["edges"][0]["size"] = 4;
  EXPECT_NE(parse_message(j.dump()).find("edges[0].size"), std::string::npos);
  j = nlohmann::json::parse(kPair);
  j["edges"][0]["endpoints"] = {0};
  EXPECT_NE(parse_message(j.dump()).find("edges[0].endpoints"), std::string::npos);
  j = nlohmann::json::parse(kPair);
  j["edges"] = nlohmann::json::array();
  EXPECT_NE(parse_message(j.dump()).find("edges"), std::string::npos);
  EXPECT_NE(parse_message("{not json").find("malformed"), std::string::npos);
}

TEST(NetworkFile, MissingFile) {
  EXPECT_THROW(load_network("/nonexistent/ptn.json"), Error);
}

TEST(Report, JsonFieldsInOrder) {
  Report r;
  r.model = "ising";
  r.dims = {2, 2};
  r.rel_error = 1e-12;
  auto j = nlohmann::ordered_json::parse(report_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, report_fields());
  r.rel_error.reset();
  EXPECT_FALSE(nlohmann::json::parse(report_json(r)).contains("rel_error"));
  EXPECT_EQ(report_json(r).find('\n'), std::string::npos);
}

TEST(Report, CsvMatchesHeader) {
  Report r;
  r.dims = {4, 4, 4};
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(count(report_csv_header()), count(report_csv_row(r)));
  EXPECT_EQ(count(report_csv_header()) + 1, long(report_fields().size()));
}

TEST(Job, ConfigValidation) {
  JobConfig c;
  EXPECT_NO_THROW(validate_config(c));
  auto bad = [&](auto edit) {
    JobConfig d;
    edit(d);
    EXPECT_THROW(validate_config(d), Error);
  };
  bad([](JobConfig& d) { d.chi = 0; });
  bad([](JobConfig& d) { d.swap_batch = 0; });
  bad([](JobConfig& d) { d.partition_size = 0; });
  bad([](JobConfig& d) { d.model = "potts"; });
  bad([](JobConfig& d) { d.beta = -1; });
  bad([](JobConfig& d) {
    d.model = "random";
    d.alpha = 0.5;
  });
  bad([](JobConfig& d) { d.model = "file"; });
}

TEST(Job, Ising2x2WithOracle) {
  JobConfig c;
  c.dims = {2, 2};
  c.beta = 0.3;
  c.chi = 16;
  c.oracle = true;
  Report r = run_job(c);
  ASSERT_TRUE(r.rel_error.has_value());
  EXPECT_LE(*r.rel_error, 1e-10);
  EXPECT_GT(r.flops, 0u);
  EXPECT_EQ(r.model, "ising");
  EXPECT_EQ(r.chi, 16);
}

TEST(Job, Deterministic) {
  JobConfig c;
  c.dims = {3, 3};
  c.chi = 2;
  c.partition_size = 2;
  c.seed = 7;
  Report a = run_job(c), b = run_job(c);
  EXPECT_EQ(a.ln_z, b.ln_z);
  EXPECT_EQ(a.flops, b.flops);
}

TEST(Job, FlopsMatchEngineTotal) {
  JobConfig c;
  c.dims = {3, 4};
  c.chi = 4;
  TensorNetwork g = build_network(c);
  ContractJob job;
  job.network = g;
  job.plan = build_plan(c, g);
  job.chi = c.chi;
  job.ansatz = c.ansatz;
  job.swap_batch = c.swap_batch;
  job.seed = c.seed;
  EXPECT_EQ(run_job(c).flops, partitioned_contract(job).flops);
}

TEST(Job, OracleSkippedWhenUnaffordable) {
  JobConfig c;
  c.model = "random";
  c.dims = {6, 6};
  c.alpha = -0.2;
  c.chi = 2;
  c.oracle = true;
  EXPECT_FALSE(oracle_lnZ(c, build_network(c)).has_value());
  EXPECT_FALSE(run_job(c).rel_error.has_value());
  c.model = "ising";
  c.dims = {6, 6};
  EXPECT_TRUE(oracle_lnZ(c, build_network(c)).has_value());
}

TEST(Job, ChiSweepTrend) {
  std::vector<double> med;
  for (Dim chi : {4, 8, 16, 32}) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      JobConfig c;
      c.dims = {4, 4};
      c.beta = 0.6;
      c.partition_size = 1 + seed % 3;
      c.ansatz = seed < 3 ? Ansatz::Mps : Ansatz::Comb;
      c.chi = chi;
      c.seed = seed;
      c.oracle = true;
      Report r = run_job(c);
      ASSERT_TRUE(r.rel_error.has_value());
      errs.push_back(*r.rel_error);
    }
    std::sort(errs.begin(), errs.end());
    med.push_back(errs[2]);
  }
  for (std::size_t i = 0; i + 1 < med.size(); ++i) EXPECT_LE(med[i + 1], med[i] * (1 + 1e-9) + 1e-13);
}
