#include <gtest/gtest.h>
#include <sys/stat.h>

#include <fstream>
#include <sstream>

#include "nprint_cli.hpp"
#include "support/packets.hpp"

using namespace nprint;
namespace fs = std::filesystem;

#ifndef NPRINT_GOLDEN_DIR
#error NPRINT_GOLDEN_DIR must point at tests/golden
#endif

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nprint");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

testpkt::Bytes tcp_from(std::uint8_t host, std::uint8_t ttl, std::uint8_t flags, std::uint16_t sport = 40000) {
  testpkt::Ipv4 ip;
  ip.src = {10, 0, 0, host};
  ip.dst = {10, 0, 1, 1};
  ip.ttl = ttl;
  testpkt::Tcp t;
  t.sport = sport;
  t.flags = flags;
  t.options = {2, 4, 5, 0xb4};
  return testpkt::ipv4_tcp(ip, t, {}, true);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testpkt::temp_dir(std::string("cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Hosts 1..hosts each send `per_host` ACK packets; odd hosts use TTL 64.
  fs::path traffic(std::size_t hosts, std::size_t per_host, std::uint8_t flags = testpkt::tcp_flags::ack) {
    std::vector<testpkt::FixtureRecord> recs;
    for (std::size_t i = 0; i < per_host; ++i) {
      for (std::size_t h = 1; h <= hosts; ++h) {
        recs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(h),
                        tcp_from(static_cast<std::uint8_t>(h), h % 2 ? 64 : 128, flags)});
      }
    }
    auto p = dir_ / "traffic.pcap";
    testpkt::write_pcap_fixture(p, recs);
    return p;
  }

  fs::path labels(const std::string& text) {
    auto p = dir_ / "labels.txt";
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST(CliHelp, SnapshotMatchesDocumentedSurface) {
  auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(fs::path(NPRINT_GOLDEN_DIR) / "nprint_help.txt"));
  EXPECT_EQ(run_cli({"-?"}).out, r.out);
}

TEST(CliHelp, UsageAndVersion) {
  auto u = run_cli({"--usage"});
  EXPECT_EQ(u.code, 0);
  EXPECT_EQ(u.out.rfind("Usage: nprint", 0), 0u);
  auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_FALSE(v.out.empty());
  auto ml = run_cli({"nprintml", "--help"});
  EXPECT_EQ(ml.code, 0);
  EXPECT_NE(ml.out.find("--pcap-dir"), std::string::npos);
}

TEST(CliHelp, ColumnListing) {
  auto all = run_cli({"-h"});
  EXPECT_EQ(all.code, 0);
  auto names = lines_of(all.out);
  EXPECT_EQ(names.size(), 112u + 480 + 320 + 480 + 64 + 64);
  EXPECT_EQ(names.front(), "eth_dhost_0");
  auto v4 = lines_of(run_cli({"-h", "-4"}).out);
  EXPECT_EQ(v4.size(), 480u);
  EXPECT_EQ(lines_of(run_cli({"-h", "-4", "-t", "-i"}).out).size(), 1024u);
}

TEST_F(CliTest, EncodeIpv4TcpWidth) {
  auto pcap = traffic(2, 3);
  auto r = run_cli({"-P", pcap.string(), "-4", "-t"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 7u);
  for (const auto& l : lines) EXPECT_EQ(fields(l), 961u);
  EXPECT_EQ(lines[1].rfind("10.0.0.1,", 0), 0u);
}

TEST_F(CliTest, WriteFileCountAndIndex) {
  auto pcap = traffic(2, 3);
  auto out = dir_ / "rows.csv";
  auto r = run_cli({"-P", pcap.string(), "-u", "-i", "-c", "4", "-O", "4", "-A", "-R", "-W", out.string(), "-S"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  auto lines = lines_of(slurp(out));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0].rfind("flow,abs_ts,rel_ts,udp_sport_0", 0), 0u);
  EXPECT_EQ(lines[1].rfind("10.0.0.1_40000_10.0.1.1_80_6,0.000001,0.000000,-1", 0), 0u);
  EXPECT_NE(r.err.find("4"), std::string::npos);
}

TEST_F(CliTest, NegativeFillSpellings) {
  auto pcap = traffic(1, 1);
  for (std::vector<std::string> f : {std::vector<std::string>{"-F", "-5"}, {"-F-5"}, {"--fill_int=-5"}, {"--fill_int", "-5"}}) {
    std::vector<std::string> args{"-P", pcap.string(), "-u"};
    args.insert(args.end(), f.begin(), f.end());
    auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_NE(lines[1].find(",-5,-5"), std::string::npos);
  }
}

TEST_F(CliTest, BitFilterRemovesColumns) {
  auto pcap = traffic(1, 1);
  auto r = run_cli({"-P", pcap.string(), "-4", "-x", "ipv4_src.*|ipv4_dst.*"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fields(lines_of(r.out).at(0)), 1u + 416);
}

TEST_F(CliTest, CaptureFilterAndSyntaxError) {
  auto pcap = traffic(3, 2);
  auto r = run_cli({"-P", pcap.string(), "-4", "-f", "host 10.0.0.2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines_of(r.out).size(), 3u);
  auto bad = run_cli({"-P", pcap.string(), "-4", "-f", "tcp[13 == 2"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(bad.out.empty());
}

TEST_F(CliTest, HexDumpInput) {
  auto pkt = testpkt::ipv4_udp({}, 7, 9, {1});
  std::string hex;
  for (auto b : pkt) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  auto path = dir_ / "hex.txt";
  std::ofstream(path) << "host-a," << hex << "\nnot-hex\n";
  auto r = run_cli({"-C", path.string(), "-u", "-S"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).size(), 2u);
}

TEST_F(CliTest, UsageErrors) {
  auto pcap = traffic(1, 1);
  EXPECT_EQ(run_cli({"-4"}).code, 1);                                             // no input
  EXPECT_EQ(run_cli({"-P", pcap.string(), "-C", "x.txt", "-4"}).code, 1);         // two inputs
  EXPECT_EQ(run_cli({"-P", pcap.string(), "--bogus"}).code, 1);                   // unknown flag
  EXPECT_EQ(run_cli({"-P", pcap.string(), "-4", "-O", "9"}).code, 1);             // bad index
  EXPECT_EQ(run_cli({"-P", pcap.string(), "-4", "-x", "(["}).code, 1);            // bad regex
  EXPECT_EQ(run_cli({"-P", pcap.string(), "-4", "-F", "300"}).code, 1);           // not int8
}

TEST_F(CliTest, MissingInputIsIoErrorWithoutOutput) {
  auto r = run_cli({"-P", (dir_ / "missing.pcap").string(), "-4"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, CorruptPcapIsFormatError) {
  std::ofstream(dir_ / "bad.pcap") << "garbage garbage garbage garbage";
  EXPECT_EQ(run_cli({"-P", (dir_ / "bad.pcap").string(), "-4"}).code, 2);
}

TEST_F(CliTest, ReverseRowsToPcap) {
  auto pcap = traffic(2, 2);
  auto rows = dir_ / "rows.csv";
  auto out = dir_ / "out.pcap";
  ASSERT_EQ(run_cli({"-P", pcap.string(), "-e", "-4", "-t", "-p", "8", "-A", "-W", rows.string()}).code, 0);
  auto r = run_cli({"-N", rows.string(), "-W", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto a = open_pcap(pcap);
  auto b = open_pcap(out);
  RawPacket x, y;
  std::size_t n = 0;
  while (a->next(x)) {
    ASSERT_TRUE(b->next(y));
    EXPECT_EQ(x.bytes, y.bytes);
    EXPECT_EQ(x.timestamp, y.timestamp);
    ++n;
  }
  EXPECT_FALSE(b->next(y));
  EXPECT_EQ(n, 4u);
}

TEST_F(CliTest, ReverseRequiresOutputAndDecodableRows) {
  auto pcap = traffic(1, 1);
  auto rows = dir_ / "rows.csv";
  ASSERT_EQ(run_cli({"-P", pcap.string(), "-4", "-x", "ipv4_ttl.*", "-W", rows.string()}).code, 0);
  EXPECT_EQ(run_cli({"-N", rows.string()}).code, 1);
  EXPECT_EQ(run_cli({"-N", rows.string(), "-W", (dir_ / "o.pcap").string()}).code, 2);
}

TEST_F(CliTest, DirectoryInput) {
  fs::create_directories(dir_ / "caps");
  testpkt::write_pcap_fixture(dir_ / "caps" / "a.pcap", {{0, 0, tcp_from(1, 64, 2)}});
  testpkt::write_pcap_fixture(dir_ / "caps" / "b.pcap", {{0, 0, tcp_from(2, 64, 2)}, {0, 1, tcp_from(3, 64, 2)}});
  auto r = run_cli({"-P", (dir_ / "caps").string(), "-4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[3].rfind("10.0.0.3,", 0), 0u);
}

TEST_F(CliTest, DeterministicOutput) {
  auto pcap = traffic(3, 5);
  auto a = run_cli({"-P", pcap.string(), "-4", "-t", "-p", "4", "-R", "-O", "4"});
  auto b = run_cli({"-P", pcap.string(), "-4", "-t", "-p", "4", "-R", "-O", "4"});
  EXPECT_EQ(a.out, b.out);
  auto l = labels("10.0.0.1,linux\n10.0.0.2,windows\n10.0.0.3,linux\n");
  auto m1 = dir_ / "m1.csv", m2 = dir_ / "m2.csv";
  ASSERT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-t", "-c", "2",
                     "-W", m1.string(), "--matrix-only"}).code,
            0);
  ASSERT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-t", "-c", "2",
                     "-W", m2.string(), "--matrix-only"}).code,
            0);
  EXPECT_EQ(slurp(m1), slurp(m2));
}

TEST_F(CliTest, NprintmlOsDetectionCommand) {
  auto pcap = traffic(4, 10);
  auto l = labels("10.0.0.1,linux\n10.0.0.2,windows\n10.0.0.3,linux\n10.0.0.4,windows\n");
  auto matrix = dir_ / "m.csv";
  ::unsetenv("NPRINTML_HARNESS");
  auto r = run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-t", "--sample_size",
                    "10", "-W", matrix.string(), "--matrix-only"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = lines_of(slurp(matrix));
  ASSERT_EQ(lines.size(), 5u);
  for (const auto& line : lines) EXPECT_EQ(fields(line), 1u + 10 * 960 + 1);
  EXPECT_EQ(lines[1].rfind("10.0.0.1,", 0), 0u);
  EXPECT_EQ(lines[1].substr(lines[1].rfind(',') + 1), "linux");
  EXPECT_EQ(lines[2].substr(lines[2].rfind(',') + 1), "windows");
  auto meta = nlohmann::json::parse(slurp(matrix.string() + ".layout.json"));
  EXPECT_EQ(meta["sample_size"], 10);
  EXPECT_EQ(meta["bit_columns"].size(), 960u);
}

TEST_F(CliTest, NprintmlPcapDirThreeFiles) {
  fs::create_directories(dir_ / "caps");
  std::string label_text;
  for (int f = 0; f < 3; ++f) {
    std::vector<testpkt::FixtureRecord> recs;
    for (int i = 0; i <= f; ++i) recs.push_back({0, static_cast<std::uint32_t>(i), tcp_from(1, 64, 2)});
    auto p = dir_ / "caps" / ("f" + std::to_string(f) + ".pcap");
    testpkt::write_pcap_fixture(p, recs);
    label_text += p.string() + ",class" + std::to_string(f % 2) + "\n";
  }
  auto l = labels(label_text);
  auto matrix = dir_ / "m.csv";
  auto r = run_cli({"nprintml", "-L", l.string(), "-a", "pcap", "--pcap-dir", (dir_ / "caps").string(), "-4", "-c",
                    "2", "-W", matrix.string(), "--matrix-only"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = lines_of(slurp(matrix));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind((dir_ / "caps" / "f0.pcap").string() + ",", 0), 0u);
  // f0 has one packet: slot 1 is padding
  EXPECT_NE(lines[1].find(",-1,-1,-1,class0"), std::string::npos);
}

TEST_F(CliTest, NprintmlPcapModeWorkersAgree) {
  fs::create_directories(dir_ / "caps");
  std::string label_text;
  for (int f = 0; f < 6; ++f) {
    std::vector<testpkt::FixtureRecord> recs;
    for (int i = 0; i < 5; ++i) recs.push_back({0, static_cast<std::uint32_t>(i), tcp_from(static_cast<std::uint8_t>(f), 64, 2)});
    auto p = dir_ / "caps" / ("f" + std::to_string(f) + ".pcap");
    testpkt::write_pcap_fixture(p, recs);
    label_text += p.string() + ",c\n";
  }
  auto l = labels(label_text);
  ::setenv("NPRINT_WORKERS", "1", 1);
  ASSERT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "pcap", "--pcap_dir", (dir_ / "caps").string(), "-4", "-c",
                     "3", "-W", (dir_ / "a.csv").string(), "--matrix-only"}).code,
            0);
  ::setenv("NPRINT_WORKERS", "4", 1);
  ASSERT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "pcap", "--pcap_dir", (dir_ / "caps").string(), "-4", "-c",
                     "3", "-W", (dir_ / "b.csv").string(), "--matrix-only"}).code,
            0);
  ::unsetenv("NPRINT_WORKERS");
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(CliTest, NprintmlNoSynTrafficIsEmptyMatrixFatal) {
  auto pcap = traffic(2, 5, testpkt::tcp_flags::ack);
  auto l = labels("10.0.0.1,a\n10.0.0.2,b\n");
  auto r = run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-t", "-f",
                    "tcp[13] == 2", "-W", (dir_ / "m.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no labeled samples"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "m.csv"));
}

TEST_F(CliTest, NprintmlArgumentErrors) {
  auto pcap = traffic(1, 1);
  auto l = labels("10.0.0.1,a\n");
  EXPECT_EQ(run_cli({"nprintml", "-a", "index", "-P", pcap.string(), "-4"}).code, 1);
  EXPECT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "flow", "-P", pcap.string(), "-4"}).code, 1);
  EXPECT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "index", "-4"}).code, 1);
  EXPECT_EQ(run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-c", "0"}).code, 1);
  EXPECT_EQ(run_cli({"nprintml", "-L", (dir_ / "none.txt").string(), "-a", "index", "-P", pcap.string(), "-4"}).code, 3);
  auto dup = dir_ / "dup.txt";
  std::ofstream(dup) << "k,a\nk,b\n";
  EXPECT_EQ(run_cli({"nprintml", "-L", dup.string(), "-a", "index", "-P", pcap.string(), "-4"}).code, 2);
}

TEST_F(CliTest, HarnessInvocationContract) {
  auto pcap = traffic(2, 2);
  auto l = labels("10.0.0.1,a\n10.0.0.2,b\n");
  auto script = dir_ / "fake-harness.sh";
  auto record = dir_ / "argv.txt";
  std::ofstream(script) << "#!/bin/sh\nfor a in \"$@\"; do echo \"$a\"; done > '" << record.string()
                        << "'\ntest -f \"$2\" && test -f \"$4\" || exit 9\nexit 0\n";
  ::chmod(script.c_str(), 0755);
  auto matrix = dir_ / "m.csv";
  ::setenv("NPRINTML_HARNESS", script.c_str(), 1);
  auto r = run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-c", "2", "-W",
                    matrix.string(), "--report_dir", (dir_ / "rep").string()});
  ::unsetenv("NPRINTML_HARNESS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(slurp(record)),
            (std::vector<std::string>{"--matrix", matrix.string(), "--layout", matrix.string() + ".layout.json",
                                      "--output", (dir_ / "rep").string()}));

  // A failing model stage propagates its exit status.
  std::ofstream(script) << "#!/bin/sh\nexit 5\n";
  auto f = run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-W", matrix.string(),
                    "--harness", script.string()});
  EXPECT_EQ(f.code, 5);
}

TEST_F(CliTest, PrimaryOnlyModeWithoutHarness) {
  auto pcap = traffic(1, 2);
  auto l = labels("10.0.0.1,a\n");
  ::unsetenv("NPRINTML_HARNESS");
  std::string old_path = std::getenv("PATH") ? std::getenv("PATH") : "";
  ::setenv("PATH", dir_.c_str(), 1);
  auto r = run_cli({"nprintml", "-L", l.string(), "-a", "index", "-P", pcap.string(), "-4", "-W",
                    (dir_ / "m.csv").string()});
  ::setenv("PATH", old_path.c_str(), 1);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("model stage not installed"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "m.csv"));
}
