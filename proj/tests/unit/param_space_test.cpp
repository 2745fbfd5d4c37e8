#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace cfgtune;
using cfgtune::testing::kafka_space;

namespace {

ParameterDefinition linear(double lo, double hi, ValueType type = ValueType::real) {
  return {"p", lo, hi, Scale::linear, type, "", std::nullopt};
}

ParameterDefinition logarithmic(double lo, double hi, ValueType type = ValueType::real) {
  return {"p", lo, hi, Scale::logarithmic, type, "", std::nullopt};
}

std::string block(const std::string& body) { return "[parameter]\n" + body; }

}  // namespace

TEST(MapToConcrete, BoundsMapToEnds) {
  for (const auto& p : {linear(0, 6788), logarithmic(1, 1e6), linear(-3, 7, ValueType::integer),
                        logarithmic(1024, 512000000, ValueType::integer)}) {
    EXPECT_EQ(map_coordinate(p, 0.0), p.min);
    EXPECT_EQ(map_coordinate(p, 1.0), p.max);
  }
}

TEST(MapToConcrete, Midpoints) {
  EXPECT_EQ(map_coordinate(linear(0, 6788), 0.5), 3394.0);
  EXPECT_NEAR(map_coordinate(logarithmic(1, 1e6), 0.5), std::sqrt(1.0 * 1e6), 1e-9);
  EXPECT_EQ(map_coordinate(logarithmic(1, 1e6, ValueType::integer), 0.5), 1000.0);
}

TEST(MapToConcrete, IntegerRoundsHalfUp) {
  // 0 + 0.25 * 10 = 2.5 exactly.
  EXPECT_EQ(map_coordinate(linear(0, 10, ValueType::integer), 0.25), 3.0);
  EXPECT_EQ(map_coordinate(linear(-10, 0, ValueType::integer), 0.75), -2.0);
  EXPECT_EQ(map_coordinate(linear(0, 10, ValueType::integer), 0.24), 2.0);
}

TEST(MapToConcrete, DimensionMismatchIsContractViolation) {
  const auto space = kafka_space();
  EXPECT_THROW(map_to_concrete(space, NormalizedConfig{{0.5, 0.5}}), ContractViolation);
  EXPECT_THROW(map_to_concrete(space, NormalizedConfig{std::vector<double>(9, 1.5)}), ContractViolation);
}

TEST(MapToNormalized, Inverses) {
  EXPECT_EQ(unmap_coordinate(linear(0, 6788), 0), 0.0);
  EXPECT_EQ(unmap_coordinate(linear(0, 6788), 6788), 1.0);
  EXPECT_NEAR(unmap_coordinate(logarithmic(1, 1e6), 1000), 0.5, 1e-12);
}

TEST(MapToNormalized, OutOfRangeNamesParameter) {
  const auto space = kafka_space();
  auto c = space.default_config();
  c.values[3].second = 20000;  // commit.interval.ms max is 10000
  try {
    map_to_normalized(space, c);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("commit.interval.ms"), std::string::npos) << e.what();
  }
}

TEST(MapToNormalized, MissingParameter) {
  const auto space = kafka_space();
  auto c = space.default_config();
  c.values.pop_back();
  EXPECT_THROW(map_to_normalized(space, c), ValidationError);
}

TEST(ParameterSpace, RejectsInvalidDefinitions) {
  EXPECT_THROW(ParameterSpace(std::vector<ParameterDefinition>{}), ValidationError);
  EXPECT_THROW(ParameterSpace({linear(5, 5)}), ValidationError);
  EXPECT_THROW(ParameterSpace({linear(6, 5)}), ValidationError);
  EXPECT_THROW(ParameterSpace({logarithmic(0, 5)}), ValidationError);
  EXPECT_THROW(ParameterSpace({linear(0.5, 5, ValueType::integer)}), ValidationError);
  EXPECT_THROW(ParameterSpace({linear(0, 1), linear(0, 2)}), ValidationError);  // both named "p"
  auto with_default = linear(0, 1);
  with_default.default_value = 2;
  EXPECT_THROW(ParameterSpace({with_default}), ValidationError);
}

TEST(LoadSpace, BundledKafkaSpace) {
  const auto space = kafka_space();
  ASSERT_EQ(space.dimension(), 9u);
  std::size_t logs = 0;
  for (const auto& p : space.parameters()) logs += p.scale == Scale::logarithmic;
  EXPECT_EQ(logs, 7u);
  EXPECT_EQ(space[*space.index_of("commit.interval.ms")].scale, Scale::linear);
  EXPECT_EQ(space[*space.index_of("producer.linger.ms")].scale, Scale::linear);
  const auto c = space.default_config();
  EXPECT_EQ(c.at("commit.interval.ms"), 5000);
  EXPECT_EQ(c.at("producer.batch.size"), 16384);
  EXPECT_EQ(c.at("consumer.max.poll.records"), 500);
}

TEST(LoadSpace, DataFileMatchesBundledCopy) {
  const auto path = std::filesystem::path(CFGTUNE_DATA_DIR) / "kafka-streams.space";
  EXPECT_EQ(load_space(path.string()), kafka_space());
}

TEST(LoadSpace, WriteThenParseIsIdentity) {
  const auto space = kafka_space();
  EXPECT_EQ(parse_space(write_space(space)), space);
}

TEST(LoadSpace, GoldenSerialization) {
  std::string why;
  EXPECT_TRUE(cfgtune::testing::matches_golden("kafka-streams.space", write_space(kafka_space()), &why)) << why;
}

TEST(LoadSpace, ErrorsCarryLineContext) {
  auto message = [](const std::string& text) {
    try {
      parse_space(text, "t.space");
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(block("name = a\nmin = 3\nmax = 3\nscale = linear\ntype = real\n")).rfind("t.space:1:", 0), 0u);
  EXPECT_NE(message(block("name = a\nmin = 0\nmax = 3\nscale = log\ntype = real\n")).find("'a'"), std::string::npos);
  EXPECT_EQ(message(block("name = a\nmin = zero\n")), "t.space:3: 'min' expects a number, got 'zero'");
  EXPECT_EQ(message(block("name = a\ncolour = red\n")), "t.space:3: unknown field 'colour'");
  EXPECT_EQ(message("min = 1\n"), "t.space:1: field outside of a [parameter] block");
  EXPECT_EQ(message(block("name = a\nmin = 0\nmax = 1\ntype = real\n")),
            "t.space:1: [parameter] block is missing 'scale'");
  EXPECT_EQ(message("# nothing\n"), "t.space: no [parameter] blocks found");
  EXPECT_NE(message(block("name = a\nmin = 0\nmax = 1\nscale = linear\ntype = real\n") +
                    block("name = a\nmin = 0\nmax = 1\nscale = linear\ntype = real\n"))
                .find("duplicate"),
            std::string::npos);
}

TEST(LoadSpace, MissingFile) { EXPECT_THROW(load_space("/nonexistent/x.space"), ValidationError); }

TEST(FormatQuantity, ReportStyle) {
  EXPECT_EQ(format_quantity(179400, "bytes"), "179.4 KB");
  EXPECT_EQ(format_quantity(10485760, "bytes"), "10.5 MB");
  EXPECT_EQ(format_quantity(512000000, "bytes"), "512.0 MB");
  EXPECT_EQ(format_quantity(73, "bytes"), "73 B");
  EXPECT_EQ(format_quantity(2900000, "records"), "2.9 M");
  EXPECT_EQ(format_quantity(5258, "records"), "5 258");
  EXPECT_EQ(format_quantity(5000, "ms"), "5 000");
  EXPECT_EQ(format_quantity(999999, "bytes"), "1.0 MB");
}

// Properties

class MappingProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(MappingProperties, RoundTripMonotoneAndClamped) {
  Rng rng(GetParam());
  std::vector<ParameterDefinition> defs;
  for (int i = 0; i < 6; ++i) {
    const bool log = rng.below(2) == 1;
    const bool integer = rng.below(2) == 1;
    double lo = log ? std::exp(rng.uniform(-5, 5)) : rng.uniform(-1000, 1000);
    double hi = lo + std::exp(rng.uniform(-2, 12));
    if (integer) {
      lo = std::ceil(lo);
      hi = std::max(std::floor(hi), lo) + 1;
      if (log && lo <= 0) lo = 1;
    }
    defs.push_back({"p" + std::to_string(i), lo, hi, log ? Scale::logarithmic : Scale::linear,
                    integer ? ValueType::integer : ValueType::real, "", std::nullopt});
  }
  const ParameterSpace space(defs);
  for (int trial = 0; trial < 200; ++trial) {
    NormalizedConfig u;
    for (std::size_t i = 0; i < space.dimension(); ++i) u.coords.push_back(rng.uniform01());
    const auto c = map_to_concrete(space, u);
    const auto back = map_to_normalized(space, c);
    const auto again = map_to_concrete(space, back);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
      const auto& p = space[i];
      EXPECT_GE(c.values[i].second, p.min);
      EXPECT_LE(c.values[i].second, p.max);
      if (p.type == ValueType::real) {
        EXPECT_NEAR(back[i], u[i], 1e-9 * std::max(1.0, std::fabs(u[i])));
      }
      EXPECT_NEAR(again.values[i].second, c.values[i].second, 1e-9 * std::max(1.0, std::fabs(c.values[i].second)));
    }
  }
  for (const auto& p : space.parameters()) {
    double prev = map_coordinate(p, 0.0);
    for (int k = 1; k <= 1000; ++k) {
      const double v = map_coordinate(p, k / 1000.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, MappingProperties, ::testing::Values(1, 2, 3, 42, 1234, 99991));
