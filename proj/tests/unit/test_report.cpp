#include <gtest/gtest.h>

#include "lpbmm/optimizer.hpp"
#include "lpbmm/report.hpp"
#include "lpbmm/synth.hpp"
#include "support/oracles.hpp"

using namespace lpbmm;

TEST(Params, JsonRoundTripIsExact) {
  std::mt19937_64 rng(1);
  const ProbeParams p = fixtures::random_params(rng, 3, 4, 1e3);
  const ProbeParams q = parse_params_json(params_json(p));
  EXPECT_EQ(p.w, q.w);
  EXPECT_EQ(p.alpha, q.alpha);
}

TEST(Params, MalformedDocuments) {
  EXPECT_THROW(parse_params_json("{"), FormatError);
  EXPECT_THROW(parse_params_json(R"({"w": [[1, 2]], "alpha": [1, 2]})"), FormatError);
  EXPECT_THROW(parse_params_json(R"({"w": [[1, 2], [1]], "alpha": [1, 2]})"), FormatError);
}

TEST(FitReport, SerializationIsDeterministic) {
  SynthConfig c;
  c.seed = 3;
  c.classes = 3;
  c.dim = 8;
  const SynthTask t = synth_task(c);
  const std::string a = fit_report_json(fit(t.split, t.text, FitOptions{}));
  const std::string b = fit_report_json(fit(t.split, t.text, FitOptions{}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("timings"), std::string::npos);
  ReportOptions with;
  with.include_timings = true;
  EXPECT_NE(fit_report_json(fit(t.split, t.text, FitOptions{}), with).find("steps_seconds"), std::string::npos);
}
