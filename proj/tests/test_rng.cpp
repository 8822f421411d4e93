#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "hetnet/rng.hpp"

using namespace hetnet;

TEST_CASE("same triple gives the same stream") {
  Rng a = seed_stream(7, 3, StreamTag::Noise);
  Rng b = seed_stream(7, 3, StreamTag::Noise);
  for (int k = 0; k < 1000; ++k) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("purpose tags are distinct and yield distinct streams") {
  const std::vector<StreamTag> tags{StreamTag::Pilots, StreamTag::Channels, StreamTag::Noise, StreamTag::Activity,
                                    StreamTag::SeSampler};
  std::set<std::uint32_t> values;
  std::set<std::string_view> names;
  std::set<std::uint64_t> first;
  for (auto t : tags) {
    values.insert(static_cast<std::uint32_t>(t));
    names.insert(to_string(t));
    first.insert(seed_stream(1, 0, t).next_u64());
  }
  CHECK(values.size() == tags.size());
  CHECK(names.size() == tags.size());
  CHECK(first.size() == tags.size());
}

TEST_CASE("streams for 1e4 trial indices share no prefix") {
  // 64-bit first draws: a birthday collision among 1e4 streams has probability
  // about 3e-12 for independent streams, so any repeat signals a mapping defect.
  std::set<std::uint64_t> heads;
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    Rng r = seed_stream(20211, t, StreamTag::Channels);
    const auto a = r.next_u64();
    const auto b = r.next_u64();
    heads.insert(a);
    pairs.insert({a, b});
  }
  CHECK(heads.size() == 10000);
  CHECK(pairs.size() == 10000);
}

TEST_CASE("base seed words above 32 bits matter") {
  Rng a = seed_stream(1, 0, StreamTag::Pilots);
  Rng b = seed_stream(1 + (std::uint64_t{1} << 32), 0, StreamTag::Pilots);
  Rng c = seed_stream(1, std::uint64_t{1} << 32, StreamTag::Pilots);
  const auto va = a.next_u64();
  CHECK(va != b.next_u64());
  CHECK(va != c.next_u64());
}

TEST_CASE("known first outputs stay fixed") {
  // Regression values: the stream definition is part of the reproducibility contract.
  Rng r = seed_stream(20211, 0, StreamTag::Pilots);
  const auto first = r.next_u64();
  Rng again = seed_stream(20211, 0, StreamTag::Pilots);
  CHECK(first == again.next_u64());
  std::seed_seq seq{20211u, 0u, 0u, 0u, 1u};
  std::mt19937_64 ref(seq);
  CHECK(first == ref());
}

TEST_CASE("uniform, normal and complex normal moments") {
  Rng r(123);
  const int n = 200000;
  double su = 0, suu = 0, sn = 0, snn = 0, sn4 = 0;
  std::complex<double> sc = 0;
  double scc = 0, sre2 = 0;
  for (int k = 0; k < n; ++k) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    suu += u * u;
    const double z = r.normal();
    sn += z;
    snn += z * z;
    sn4 += z * z * z * z;
    const auto c = r.complex_normal(2.0);
    sc += c;
    scc += std::norm(c);
    sre2 += c.real() * c.real();
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(suu / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(snn / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.03));
  CHECK(std::abs(sc / double(n)) < 0.02);
  CHECK(scc / n == doctest::Approx(2.0).epsilon(0.01));
  CHECK(sre2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform_index is unbiased") {
  Rng r(99);
  const int bins = 7;
  const int n = 70000;
  std::vector<int> counts(bins, 0);
  for (int k = 0; k < n; ++k) {
    const auto v = r.uniform_index(bins);
    REQUIRE(v < bins);
    ++counts[v];
  }
  double chi2 = 0;
  const double expected = double(n) / bins;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.5);  // 99.9% quantile for 6 degrees of freedom
  CHECK(r.uniform_index(1) == 0);
  CHECK(r.uniform_index(0) == 0);
}

TEST_CASE("sign and bernoulli frequencies") {
  Rng r(5);
  const int n = 100000;
  int plus = 0, hits = 0;
  for (int k = 0; k < n; ++k) {
    const double s = r.sign();
    REQUIRE(std::abs(s) == 1.0);
    plus += s > 0;
    hits += r.bernoulli(0.05);
  }
  CHECK(std::abs(plus - n / 2) < 4 * std::sqrt(n * 0.25));
  CHECK(std::abs(hits - n * 0.05) < 4 * std::sqrt(n * 0.05 * 0.95));
}
