#include <gtest/gtest.h>

#include "cmclab/config.hpp"
#include "cmclab/errors.hpp"

using namespace cmclab;

namespace {

const char* kMinimal = R"(schema_version: 1
model:
  segments:
    - {kind: collar, label: C-, width: 3, volume: 2, profile: falling}
    - {kind: wedge, label: S1, width: 1, volume: 2}
    - {kind: collar, label: C+, width: 3, volume: 2, profile: rising}
)";

template <typename E>
E expect_throw(const std::string& text) {
  try {
    parse_config(text);
  } catch (const E& e) {
    return e;
  } catch (const std::exception& e) {
    ADD_FAILURE() << "unexpected exception: " << e.what();
    throw;
  }
  ADD_FAILURE() << "no exception";
  throw std::logic_error("no exception");
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.dimension, 2);
  EXPECT_EQ(c.closure, Closure::truncated);
  EXPECT_EQ(c.outer_boundary, OuterBoundary::neumann);
  EXPECT_EQ(c.segments.size(), 3u);
  EXPECT_EQ(c.solver, SolverConfig{});
  EXPECT_EQ(c.ladder.lambdas(), (std::vector<double>{10, 100, 1000, 10000}));
  EXPECT_EQ(c.diagnostics, DiagnosticsConfig{});
  EXPECT_EQ(c.output_directory, "cmclab-out");
  EXPECT_EQ(c.seed, 0u);
  const std::vector<CurveClass> cls = c.effective_classes();
  ASSERT_EQ(cls.size(), 2u);
  EXPECT_EQ(cls[0].crossings, std::vector<std::string>{"S1"});
  EXPECT_EQ(cls[1].winding, 1);
}

TEST(Config, RoundtripIsIdentical) {
  RunConfig c = parse_config(kMinimal);
  c.solver.tolerance = 1.0 / 3.0 * 1e-9;
  c.solver.cells_per_unit = 0.1 + 0.2;
  c.ladder.ratio = 3.0;  // inactive once values are set
  c.ladder.geometric = false;
  c.ladder.values = {7.25, 1.0 / 0.03, 1e4 / 3.0, 12345.678901234567};
  c.classes = {{"a", {"S1"}, 0}, {"b", {"S1", "S1"}, 0}, {"w", {}, 2}};
  c.diagnostics.flatness = false;
  c.output_directory = "out dir/with: colon";
  c.seed = 18446744073709551615ull;
  const std::string text = serialize_config(c);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), text);
  // Default config as well.
  const RunConfig d = parse_config(kMinimal);
  EXPECT_EQ(parse_config(serialize_config(d)), d);
}

TEST(Config, LadderRatioBelowOne) {
  const ValidationError e = expect_throw<ValidationError>(std::string(kMinimal) + "ladder: {ratio: 0.5}\n");
  EXPECT_EQ(e.field(), "ladder.ratio");
}

TEST(Config, LadderValuesMustIncrease) {
  EXPECT_EQ(expect_throw<ValidationError>(std::string(kMinimal) + "ladder: {values: [10, 10]}\n").field(),
            "ladder.values");
  expect_throw<ParseError>(std::string(kMinimal) + "ladder: {values: [10], count: 3}\n");
}

TEST(Config, UnknownKeysCarryPosition) {
  const ParseError e = expect_throw<ParseError>(std::string(kMinimal) + "solver: {tolerance: 1e-9, tolerence: 1}\n");
  EXPECT_EQ(e.line(), 7);
  EXPECT_GT(e.column(), 1);
  EXPECT_NE(std::string(e.what()).find("tolerence"), std::string::npos);
  const ParseError top = expect_throw<ParseError>(std::string(kMinimal) + "extra: 1\n");
  EXPECT_EQ(top.line(), 7);
  EXPECT_EQ(top.column(), 1);
}

TEST(Config, SyntaxAndTypeErrors) {
  const ParseError syntax = expect_throw<ParseError>("schema_version: 1\nmodel: {segments: [\n");
  EXPECT_GE(syntax.line(), 2);
  const ParseError type = expect_throw<ParseError>(std::string(kMinimal) + "solver: {max_iterations: many}\n");
  EXPECT_EQ(type.line(), 7);
  expect_throw<ParseError>(std::string(kMinimal) + "seed: -1\n");
}

TEST(Config, UnknownWedgeLabelInClass) {
  const ValidationError e =
      expect_throw<ValidationError>(std::string(kMinimal) + "classes:\n  - {label: x, crossings: [S9]}\n");
  EXPECT_EQ(e.field(), "classes[0].crossings");
}

TEST(Config, SchemaVersion) {
  EXPECT_EQ(expect_throw<ValidationError>("schema_version: 2\nmodel: {segments: []}\n").field(), "schema_version");
  expect_throw<ParseError>("model: {segments: []}\n");
}

TEST(Config, ModelErrorsNameTheField) {
  EXPECT_EQ(expect_throw<ValidationError>("schema_version: 1\nmodel: {dimension: 1, segments: "
                                          "[{kind: wedge, label: S, width: 1, volume: 1}]}\n")
                .field(),
            "model.dimension");
  EXPECT_EQ(expect_throw<ValidationError>("schema_version: 1\nmodel: {segments: "
                                          "[{kind: wedge, label: S, width: -1, volume: 1}]}\n")
                .field(),
            "model.segments");
  expect_throw<ParseError>("schema_version: 1\nmodel: {segments: [{kind: wedge, label: S, width: 1}]}\n");
  expect_throw<ParseError>("schema_version: 1\nmodel: {segments: [{kind: hoop, label: S, width: 1, volume: 1}]}\n");
}

TEST(Config, LadderSpec) {
  const LadderConfig l = parse_ladder_spec("10:4:5");
  EXPECT_EQ(l.lambdas(), (std::vector<double>{10, 40, 160, 640, 2560}));
  EXPECT_THROW(parse_ladder_spec("10:4"), ValidationError);
  EXPECT_THROW(parse_ladder_spec("10:x:4"), ValidationError);
  try {
    parse_ladder_spec("10:0.5:4");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "ladder.ratio");
  }
}

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(load_config("/nonexistent/run.yaml"), IoError); }
