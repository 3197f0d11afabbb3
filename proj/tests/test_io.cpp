#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "stlcp/error.hpp"
#include "stlcp/harness.hpp"
#include "stlcp/io.hpp"
#include "stlcp/parser.hpp"

using namespace stlcp;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Internal;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "stlcp_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(TrajectoryCsv, RoundTrip) {
  auto sys = SyntheticSystem::preset(SystemKind::SwitchingNoise);
  Dataset d{sys.schema(), generate(sys, 5, 2)};
  auto text = trajectories_csv(d);
  EXPECT_EQ(text.substr(0, text.find('\n')), "traj_id,tau,x,y");
  auto back = parse_trajectories_csv(text);
  EXPECT_EQ(back.schema, d.schema);
  ASSERT_EQ(back.trajectories.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.trajectories[i].id, d.trajectories[i].id);
    EXPECT_EQ(back.trajectories[i].states, d.trajectories[i].states);  // bit exact
  }
}

TEST(TrajectoryCsv, Errors) {
  EXPECT_EQ(code_of([] { parse_trajectories_csv(""); }), ErrorCode::Format);
  EXPECT_EQ(code_of([] { parse_trajectories_csv("id,tau,x\na,0,1\n"); }), ErrorCode::Format);
  EXPECT_EQ(code_of([] { parse_trajectories_csv("traj_id,tau,x\na,1,1\n"); }), ErrorCode::Format);
  EXPECT_EQ(code_of([] { parse_trajectories_csv("traj_id,tau,x\na,0,1\na,1\n"); }), ErrorCode::Format);
  EXPECT_EQ(code_of([] { parse_trajectories_csv("traj_id,tau,x\na,0,nan\n"); }), ErrorCode::Format);
  EXPECT_EQ(code_of([] { parse_trajectories_csv("traj_id,tau,x\na,0,1\nb,0,1\na,1,2\n"); }),
            ErrorCode::Format);
  auto ok = parse_trajectories_csv("traj_id, tau, x\n# comment\na,0,1.5\na,1,2\nb,0,-3e2\n");
  ASSERT_EQ(ok.trajectories.size(), 2u);
  EXPECT_EQ(ok.trajectories[1].states.at(0)[0], -300.0);
}

TEST(TrajectoryJsonl, Parse) {
  auto d = parse_trajectories_jsonl(
      "{\"id\": \"a\", \"states\": [[1, 2], [3, 4]], \"names\": [\"p\", \"q\"]}\n"
      "{\"id\": \"b\", \"states\": [[5, 6]]}\n");
  EXPECT_EQ(d.schema.names, (std::vector<std::string>{"p", "q"}));
  ASSERT_EQ(d.trajectories.size(), 2u);
  EXPECT_EQ(d.trajectories[1].states, Signal::from_rows({{5, 6}}));
  auto numbered = parse_trajectories_jsonl("{\"id\": \"a\", \"states\": [[1], [2]]}\n");
  EXPECT_EQ(numbered.schema.names, (std::vector<std::string>{"x1"}));
  EXPECT_THROW(parse_trajectories_jsonl("{\"id\": \"a\", \"states\": [[1], [2, 3]]}\n"), Error);
  EXPECT_THROW(parse_trajectories_jsonl("{\"id\": \"a\"}\n"), Error);
  EXPECT_THROW(parse_trajectories_jsonl("not json\n"), Error);
}

TEST(TrajectoryFiles, ReadWrite) {
  Dataset d{Schema{{"x"}}, {{"only", Signal(1, {0.1, 0.2, 0.30000000000000004})}}};
  auto csv = scratch("t.csv");
  write_trajectories(csv, d);
  EXPECT_EQ(read_trajectories(csv).trajectories[0].states, d.trajectories[0].states);
  EXPECT_EQ(code_of([] { read_trajectories("/nonexistent/file.csv"); }), ErrorCode::Io);
}

TEST(PredictionTable, RoundTripAndErrors) {
  PredictionTable t;
  t.dim = 2;
  t.rows[{"a", 3}] = {{1.0, 2.0}, {3.0, 4.0}};
  t.rows[{"b", 3}] = {{0.1, 0.2}};
  auto text = prediction_table_csv(t);
  EXPECT_EQ(text.substr(0, text.find('\n')), "traj_id,t,tau,x1,x2");
  auto back = parse_prediction_table(text);
  EXPECT_EQ(back.dim, 2u);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_THROW(parse_prediction_table("traj_id,t,tau,x\na,3,5,1\n"), Error);  // tau must start at t+1
  EXPECT_THROW(parse_prediction_table("traj_id,t,tau,x\na,3,4,1,2\n"), Error);
  EXPECT_THROW(parse_prediction_table("traj,t,tau,x\na,3,4,1\n"), Error);
}

TEST(PredictorArtifact, RoundTrip) {
  ArModel m;
  m.order = 2;
  m.dim = 1;
  m.t = 7;
  m.max_horizon = 4;
  m.weights = {0.1, 1.0 / 3.0, -2.5e-17};
  auto p = Predictor::autoregressive(m);
  auto back = parse_predictor_artifact(predictor_artifact(p));
  EXPECT_EQ(back.kind(), PredictorKind::Autoregressive);
  EXPECT_EQ(back.ar().weights, m.weights);
  EXPECT_EQ(back.ar().t, 7);
  EXPECT_EQ(back.max_horizon(), 4);
  EXPECT_EQ(parse_predictor_artifact(predictor_artifact(Predictor::hold_last())).kind(),
            PredictorKind::HoldLast);

  write_file(scratch("table.csv"), "traj_id,t,tau,x\na,0,1,5\n");
  auto ext = parse_predictor_artifact("format=stlcp-predictor/1\nkind=external\ntable=table.csv\n",
                                      scratch("table.csv").parent_path());
  EXPECT_EQ(ext.kind(), PredictorKind::External);
  EXPECT_THROW(parse_predictor_artifact("kind=ar\n"), Error);
  EXPECT_THROW(parse_predictor_artifact("format=stlcp-predictor/1\nkind=ar\norder=2\ndim=1\nt=1\n"
                                        "max_horizon=1\nweights=1,2\n"),
               Error);
}

TEST(CalibrationArtifact, BitExactRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> scores(200);
  for (auto& s : scores) s = u(rng);
  Calibration c;
  c.method = Method::Direct;
  c.delta = 0.05;
  c.k = 200;
  c.tau0 = 20;
  c.t = 20;
  c.horizon = 20;
  c.formula_hash = formula_hash(parse("G[0,20](x >= 0.5)"));
  c.regions = {quantile_region(ScoreSet(scores), 0.05)};
  const auto text = calibration_artifact(c);
  auto back = parse_calibration_artifact(text);
  EXPECT_EQ(back.regions.front().value, c.regions.front().value);
  EXPECT_EQ(back.rank(), 191u);
  EXPECT_EQ(back.formula_hash, c.formula_hash);
  EXPECT_EQ(calibration_artifact(back), text);

  Calibration ind;
  ind.method = Method::Indirect;
  ind.delta = 0.05;
  ind.k = 20;
  ind.t = 3;
  ind.horizon = 2;
  ind.norm = Norm::Linf;
  ind.regions = {RegionConstant{std::numeric_limits<double>::infinity(), 21, 20, 0.025},
                 RegionConstant{std::numeric_limits<double>::infinity(), 21, 20, 0.025}};
  const auto itext = calibration_artifact(ind);
  EXPECT_NE(itext.find("C_tau=inf,inf\n"), std::string::npos);
  EXPECT_NE(itext.find("delta_bar=0.025\n"), std::string::npos);
  auto iback = parse_calibration_artifact(itext);
  EXPECT_EQ(iback.norm, Norm::Linf);
  EXPECT_EQ(calibration_artifact(iback), itext);
}

TEST(CalibrationArtifact, RejectsInconsistentFiles) {
  const std::string good =
      "format=stlcp-calibration/1\nmethod=direct\ndelta=0.05\nk=200\np=191\ntau0=0\nt=0\n"
      "horizon=5\nnorm=L2\nformula_hash=abc\nC=0.5\n";
  EXPECT_NO_THROW(parse_calibration_artifact(good));
  auto replace = [&](const std::string& from, const std::string& to) {
    auto s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_calibration_artifact(replace("p=191", "p=190")), Error);
  EXPECT_THROW(parse_calibration_artifact(replace("C=0.5", "C=inf")), Error);
  EXPECT_THROW(parse_calibration_artifact(replace("method=direct", "method=other")), Error);
  EXPECT_THROW(parse_calibration_artifact(replace("C=0.5\n", "")), Error);
  EXPECT_THROW(parse_calibration_artifact(good + "k=3\n"), Error);
}

TEST(VerdictRecord, Format) {
  Verdict v;
  v.method = Method::Direct;
  v.delta = 0.05;
  v.robustness = 0.75;
  v.regions = {RegionConstant{0.25, 191, 200, 0.05}};
  v.guaranteed = true;
  v.t = 230;
  v.tau0 = 230;
  v.horizon = 200;
  v.formula_hash = "09593425ae6e4e16";
  EXPECT_EQ(verdict_record(v, "cafe"),
            "method=direct delta=0.05 rho=0.75 region=0.25 guaranteed=true t=230 tau0=230 H=200 "
            "formula_hash=09593425ae6e4e16 config_hash=cafe");
}

TEST(Numbers, Parse) {
  EXPECT_EQ(parse_double("0.1"), 0.1);
  EXPECT_EQ(parse_double("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(parse_double("inf"), std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.0x"), Error);
  EXPECT_THROW(parse_double(""), Error);
  EXPECT_EQ(parse_step("42"), 42);
  EXPECT_THROW(parse_step("4.2"), Error);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e300), "1e+300");
}

TEST(KeyValues, Parse) {
  auto kv = parse_key_values("# c\na = 1\n\nb=two words\n");
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "two words");
  EXPECT_THROW(parse_key_values("a=1\na=2\n"), Error);
  EXPECT_THROW(parse_key_values("novalue\n"), Error);
}
