#include <gtest/gtest.h>

#include <sstream>

#include "nprint/aggregator.hpp"
#include "support/packets.hpp"

using namespace nprint;

namespace {

FingerprintRow row_of(std::size_t width, std::int8_t v, std::string key = "k") {
  FingerprintRow r;
  r.index_key = std::move(key);
  r.bits.assign(width, v);
  return r;
}

std::vector<std::pair<std::string, FingerprintRow>> same_key_rows(std::size_t n, std::size_t width) {
  std::vector<std::pair<std::string, FingerprintRow>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.emplace_back("k", row_of(width, static_cast<std::int8_t>(i % 2)));
  return rows;
}

LabelTable labels_from(const std::string& text) {
  std::istringstream in(text);
  return LabelTable::parse(in);
}

}  // namespace

TEST(Assemble, TwentyFiveRowsWindowsOfTen) {
  auto rows = same_key_rows(25, 4);
  auto samples = assemble(rows, 10, AssembleMode::index, 4);
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[0].real_packets, 10u);
  EXPECT_EQ(samples[1].real_packets, 10u);
  EXPECT_EQ(samples[2].real_packets, 5u);
  for (const auto& s : samples) EXPECT_EQ(s.packets.size(), 10u);
  for (std::size_t k = 5; k < 10; ++k) {
    EXPECT_EQ(samples[2].packets[k].bits, std::vector<std::int8_t>(4, -1));
  }
  // windows keep arrival order: row 20 (even) opens the third sample
  EXPECT_EQ(samples[2].packets[0].bits[0], 0);
  EXPECT_EQ(samples[2].packets[1].bits[0], 1);
}

TEST(Assemble, DropPartial) {
  Assembler a(10, AssembleMode::index, 4, -1, true);
  std::size_t complete = 0;
  for (auto& [k, r] : same_key_rows(25, 4)) complete += a.push(k, r).has_value();
  EXPECT_EQ(complete, 2u);
  EXPECT_TRUE(a.finish().empty());
  EXPECT_EQ(a.dropped_partial(), 1u);
}

TEST(Assemble, PcapModeFullCapture) {
  auto rows = same_key_rows(43, 8);
  for (auto& r : rows) r.first = "/data/handshake.pcap";
  auto samples = assemble(rows, 43, AssembleMode::pcap, 8);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].real_packets, 43u);
  EXPECT_EQ(samples[0].group_key, "/data/handshake.pcap");
}

TEST(Assemble, PcapModeKeepsOnlyFirstN) {
  auto rows = same_key_rows(25, 2);
  auto samples = assemble(rows, 10, AssembleMode::pcap, 2);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].real_packets, 10u);
}

TEST(Assemble, PcapModeShortFilePadded) {
  Assembler a(5, AssembleMode::pcap, 2, -1);
  EXPECT_FALSE(a.push("a.pcap", row_of(2, 0)));
  auto s = a.finish_group("a.pcap");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->real_packets, 1u);
  EXPECT_EQ(s->packets.size(), 5u);
  EXPECT_FALSE(a.push("a.pcap", row_of(2, 0)));
  EXPECT_TRUE(a.finish().empty());
}

TEST(Assemble, EmptyInputNoSamples) {
  EXPECT_TRUE(assemble({}, 3, AssembleMode::index, 4).empty());
}

TEST(Assemble, InterleavedKeysFirstAppearanceOrder) {
  std::vector<std::pair<std::string, FingerprintRow>> rows;
  for (const char* k : {"b", "a", "b", "c", "a"}) rows.emplace_back(k, row_of(1, 0, k));
  auto samples = assemble(rows, 2, AssembleMode::index, 1);
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[0].group_key, "b");
  EXPECT_EQ(samples[1].group_key, "a");
  EXPECT_EQ(samples[2].group_key, "c");
  EXPECT_EQ(samples[2].real_packets, 1u);
}

TEST(Assemble, WidthMismatchFatal) {
  Assembler a(2, AssembleMode::index, 4, -1);
  try {
    a.push("k", row_of(5, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
  }
  EXPECT_THROW(Assembler(0, AssembleMode::index, 4, -1), Error);
}

TEST(AssembleProperty, EveryRowLandsInExactlyOneSlot) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 7;
    std::size_t keys = 1 + rng() % 5;
    std::size_t count = rng() % 60;
    std::vector<std::pair<std::string, FingerprintRow>> rows;
    std::map<std::string, std::size_t> per_key;
    for (std::size_t i = 0; i < count; ++i) {
      std::string k = "k" + std::to_string(rng() % keys);
      ++per_key[k];
      rows.emplace_back(k, row_of(3, static_cast<std::int8_t>(i % 2)));
    }
    auto samples = assemble(rows, n, AssembleMode::index, 3);
    std::size_t expected_samples = 0, real = 0;
    for (auto& [k, c] : per_key) expected_samples += (c + n - 1) / n;
    for (const auto& s : samples) {
      ASSERT_EQ(s.packets.size(), n);
      ASSERT_GE(s.real_packets, 1u);
      real += s.real_packets;
      for (std::size_t j = s.real_packets; j < n; ++j) ASSERT_EQ(s.packets[j].bits, std::vector<std::int8_t>(3, -1));
    }
    ASSERT_EQ(samples.size(), expected_samples);
    ASSERT_EQ(real, count);
  }
}

TEST(Labels, ParseAndJoin) {
  auto table = labels_from("a.pcap,linux\nb.pcap,windows\n");
  std::vector<Sample> samples(3);
  samples[0].group_key = "a.pcap";
  samples[1].group_key = "b.pcap";
  samples[2].group_key = "c.pcap";
  auto joined = join_labels(samples, table);
  ASSERT_EQ(joined.samples.size(), 2u);
  EXPECT_EQ(joined.dropped, 1u);
  EXPECT_EQ(joined.samples[0].label, "linux");
  EXPECT_EQ(joined.samples[1].label, "windows");
}

TEST(Labels, EmptyTableDropsAll) {
  LabelTable table = labels_from("");
  std::vector<Sample> samples(2);
  samples[0].group_key = "x";
  samples[1].group_key = "y";
  auto joined = join_labels(samples, table);
  EXPECT_TRUE(joined.samples.empty());
  EXPECT_EQ(joined.dropped, 2u);
}

TEST(Labels, DuplicateKeyFatal) {
  try {
    labels_from("a,1\nb,2\na,3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos);
  }
}

TEST(Labels, MalformedLineFatal) {
  EXPECT_THROW(labels_from("just-a-key\n"), Error);
  EXPECT_THROW(labels_from("key,\n"), Error);
}

TEST(Labels, KeyMayContainCommasAndCrlf) {
  auto table = labels_from("a,b,label\r\n\n");
  EXPECT_EQ(table.size(), 1u);
  EXPECT_EQ(table.lookup("a,b"), "label");
}

TEST(Labels, NormalizedPathFallback) {
  auto table = labels_from("data/./x.pcap,1\n");
  EXPECT_EQ(table.lookup("data/x.pcap"), "1");
  EXPECT_EQ(table.lookup("data/sub/../x.pcap"), "1");
  EXPECT_FALSE(table.lookup("other.pcap"));
}

TEST(Labels, MissingFileIsIoError) {
  try {
    LabelTable::load("/nonexistent/labels.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Matrix, TwoSamplesUdpWidth) {
  auto cols = Layout(make_config({Section::udp})).bit_column_names();
  std::vector<Sample> samples(2);
  for (auto& s : samples) {
    s.group_key = "k";
    s.label = "L";
    s.packets = {row_of(64, 0), row_of(64, 1)};
    s.real_packets = 2;
  }
  std::ostringstream out;
  emit_matrix(samples, out, 2, cols);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 3u);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ',') + 1, 2 * 64 + 2);
  EXPECT_EQ(lines[0].rfind("key,pkt0_udp_sport_0,", 0), 0u);
  EXPECT_NE(lines[0].find(",pkt1_udp_cksum_15,label"), std::string::npos);
}

TEST(Matrix, ZeroSamplesHeaderOnly) {
  auto cols = Layout(make_config({Section::udp})).bit_column_names();
  std::ostringstream out;
  emit_matrix({}, out, 2, cols);
  auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(Matrix, CommaInKeySanitized) {
  std::vector<std::string> cols{"udp_sport_0"};
  Sample s;
  s.group_key = "dir,1/a.pcap";
  s.label = "x";
  s.packets = {row_of(1, 1)};
  s.real_packets = 1;
  std::ostringstream out;
  emit_matrix(std::span(&s, 1), out, 1, cols);
  EXPECT_EQ(out.str(), "key,pkt0_udp_sport_0,label\ndir_1/a.pcap,1,x\n");
}

TEST(Matrix, TimestampsAndPaddingUseFill) {
  std::vector<std::string> cols{"udp_sport_0"};
  Sample s;
  s.group_key = "k";
  s.label = "x";
  auto r = row_of(1, 0);
  r.abs_ts = std::chrono::microseconds(1'000'001);
  r.rel_ts = std::chrono::microseconds(0);
  s.packets = {r, row_of(1, -1)};
  s.real_packets = 1;
  std::ostringstream out;
  emit_matrix(std::span(&s, 1), out, 2, cols, true, true);
  EXPECT_EQ(out.str(),
            "key,pkt0_abs_ts,pkt0_rel_ts,pkt0_udp_sport_0,pkt1_abs_ts,pkt1_rel_ts,pkt1_udp_sport_0,label\n"
            "k,1.000001,0.000000,0,-1,-1,-1,x\n");
}

TEST(Matrix, WidthMismatchFatal) {
  std::vector<std::string> cols{"a_0", "a_1"};
  Sample s;
  s.group_key = "k";
  s.packets = {row_of(3, 0)};
  s.real_packets = 1;
  std::ostringstream out;
  EXPECT_THROW(emit_matrix(std::span(&s, 1), out, 1, cols), Error);
  s.packets = {row_of(2, 0), row_of(2, 0)};
  EXPECT_THROW(emit_matrix(std::span(&s, 1), out, 1, cols), Error);
}
