#pragma once

// Command-line front end: `nprint` (encode / reverse) and `nprintml`
// (encode, assemble samples, join labels, hand off to the model stage).

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nprint/nprint.hpp"

namespace nprint::cli {

inline constexpr std::string_view kVersion = "nprint 1.0.0";

inline constexpr std::string_view kNprintHelp =
    R"(Usage: nprint [OPTION...]
  -4, --ipv4                 include ipv4 headers
  -6, --ipv6                 include ipv6 headers
  -A, --absolute_timestamps  include absolute timestmap field
  -c, --count=INTEGER        number of packets to parse (if not all)
  -C, --csv_file=FILE        csv (hex packets) infile
  -d, --device=STRING        device to capture from if live capture
  -e, --eth                  include eth headers
  -f, --filter=STRING        filter for libpcap
  -F, --fill_int=INT8_T      integer to fill missing bits with
  -h, --nprint_filter_help   print regex possibilities
  -i, --icmp                 include icmp headers
  -N, --nPrint_file=FILE     nPrint infile
  -O, --write_index=INTEGER  Output file Index (first column) Options:
                             0: source IP (default)
                             1: destination IP
                             2: source port
                             3: destination port
                             4: flow (5-tuple)
  -p, --payload=PAYLOAD_SIZE include n bytes of payload
  -P, --pcap_file=FILE       pcap infile
  -R, --relative_timestamps  include relative timestamp field
  -S, --stats                print stats about packets processed when finished
  -t, --tcp                  include tcp headers
  -u, --udp                  include udp headers
  -V, --verbose              print human readable packets with nPrints
  -W, --write_file=FILE      file for output, else stdout
  -x, --nprint_filter=STRING regex to filter bits out of nPrint. nprint -h for
                             details
  -?, --help                 Give this help list
      --usage                Give a short usage message
      --version              Print program version
)";

inline constexpr std::string_view kNprintUsage =
    "Usage: nprint [-4eiRStuV6A?] [-c INTEGER] [-C FILE] [-d STRING] [-f STRING]\n"
    "              [-F INT8_T] [-N FILE] [-O INTEGER] [-p PAYLOAD_SIZE] [-P FILE]\n"
    "              [-W FILE] [-x STRING] [-h] [--help] [--usage] [--version]\n";

inline constexpr std::string_view kNprintmlHelp =
    R"(Usage: nprint nprintml [OPTION...]
  -L, --label_file=FILE      key,label file (required)
  -a, --aggregator=MODE      sample grouping: index | pcap (required)
  -P, --pcap_file=FILE       pcap infile
      --pcap-dir=DIR         directory of pcap files (alias --pcap_dir)
  -c, --sample_size=INTEGER  packets per sample (default 1)
      --drop-partial         discard groups with fewer than sample_size packets
  -W, --write_file=FILE      feature matrix output (default nprint_matrix.csv)
      --report_dir=DIR       output directory for the model stage
                             (default nprintml_report)
      --matrix-only          stop after writing the feature matrix
      --harness=PATH         model stage executable (default: $NPRINTML_HARNESS,
                             then nprintml-harness on PATH)
  -4, -6, -e, -t, -u, -i     include ipv4/ipv6/eth/tcp/udp/icmp headers
  -p, --payload=PAYLOAD_SIZE include n bytes of payload
  -A, -R                     include absolute / relative timestamps
  -f, --filter=STRING        capture filter
  -F, --fill_int=INT8_T      integer to fill missing bits with
  -O, --write_index=INTEGER  row index used by -a index (0-4, as for nprint)
  -x, --nprint_filter=STRING regex to filter bits out of each packet
  -S, --stats                print stats when finished
  -?, --help                 Give this help list
      --version              Print program version

Environment: NPRINT_WORKERS sets the number of parallel file workers.
)";

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Flags shared by both verbs.
struct EncodeFlags {
  bool ipv4 = false, ipv6 = false, eth = false, tcp = false, udp = false, icmp = false;
  bool absolute_ts = false, relative_ts = false;
  int payload = 0;
  int fill = -1;
  int write_index = 0;
  std::string filter;
  std::string bit_filter;
  bool stats = false;
  bool verbose = false;

  void add_to(CLI::App& app) {
    app.add_flag("-4,--ipv4", ipv4);
    app.add_flag("-6,--ipv6", ipv6);
    app.add_flag("-e,--eth", eth);
    app.add_flag("-t,--tcp", tcp);
    app.add_flag("-u,--udp", udp);
    app.add_flag("-i,--icmp", icmp);
    app.add_flag("-A,--absolute_timestamps", absolute_ts);
    app.add_flag("-R,--relative_timestamps", relative_ts);
    app.add_option("-p,--payload", payload)->check(CLI::Range(0, 65535));
    app.add_option("-F,--fill_int", fill)->check(CLI::Range(-128, 127));
    app.add_option("-O,--write_index", write_index)->check(CLI::Range(0, 4));
    app.add_option("-f,--filter", filter);
    app.add_option("-x,--nprint_filter", bit_filter);
    app.add_flag("-S,--stats", stats);
    app.add_flag("-V,--verbose", verbose);
  }

  EncodingConfig config() const {
    EncodingConfig c;
    c.enable(Section::ipv4, ipv4)
        .enable(Section::ipv6, ipv6)
        .enable(Section::eth, eth)
        .enable(Section::tcp, tcp)
        .enable(Section::udp, udp)
        .enable(Section::icmp, icmp);
    c.payload_bytes = static_cast<std::size_t>(payload);
    c.fill = static_cast<std::int8_t>(fill);
    c.absolute_ts = absolute_ts;
    c.relative_ts = relative_ts;
    c.index_mode = static_cast<IndexMode>(write_index);
    if (!bit_filter.empty()) c.bit_filter = bit_filter;
    c.stats = stats;
    c.verbose = verbose;
    return c;
  }

  std::optional<CaptureFilter> capture_filter() const {
    if (filter.empty()) return std::nullopt;
    return CaptureFilter::compile(filter);
  }
};

/// One-line human readable rendering used by -V.
inline std::string describe(const ParsedPacket& p) {
  std::ostringstream s;
  s << format_timestamp(p.raw.timestamp);
  if (p.has(Section::eth)) s << " eth";
  if (p.has(Section::ipv4) || p.has(Section::ipv6)) {
    s << (p.has(Section::ipv4) ? " ipv4 " : " ipv6 ") << format_address(p.src_address()) << " > "
      << format_address(p.dst_address());
    auto h = p.network_header();
    if (p.has(Section::ipv4)) s << " ttl " << int(h[8]);
    else s << " hlim " << int(h[7]);
  }
  if (p.has(Section::tcp)) {
    auto t = p.bytes(Section::tcp);
    static constexpr char kFlags[] = "CEUAPRSF";
    std::string flags;
    for (int i = 0; i < 8; ++i) {
      if (t[13] & (0x80 >> i)) flags += kFlags[i];
    }
    s << " tcp " << *p.src_port() << " > " << *p.dst_port() << " [" << flags << "] hlen " << t.size();
  } else if (p.has(Section::udp)) {
    s << " udp " << *p.src_port() << " > " << *p.dst_port();
  } else if (p.has(Section::icmp)) {
    auto c = p.bytes(Section::icmp);
    s << " icmp type " << int(c[0]) << " code " << int(c[1]);
  }
  if (const auto& r = p.range(Section::payload)) s << " payload " << r->length;
  if (!p.well_formed) s << " (malformed)";
  return s.str();
}

inline std::string describe(const FingerprintRow& row) {
  std::ostringstream s;
  s << "  " << row.index_key << ":";
  for (std::int8_t v : row.bits) s << ' ' << int(v);
  return s.str();
}

/// Output file or stdout.
class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw io_error("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct EncodeTotals {
  std::size_t read = 0;
  std::size_t filtered_out = 0;
  std::size_t encoded = 0;
  std::size_t malformed = 0;
  std::size_t truncated = 0;
  std::size_t bad_records = 0;

  void add(const StreamStats& s, const SourceStats& src) {
    read += s.read;
    filtered_out += s.filtered_out;
    truncated += src.truncated;
    bad_records += src.malformed;
  }

  void print(std::ostream& err) const {
    err << "packets read: " << read << '\n'
        << "packets filtered out: " << filtered_out << '\n'
        << "packets encoded: " << encoded << '\n'
        << "malformed packets skipped: " << malformed << '\n'
        << "truncated records: " << truncated << '\n'
        << "unreadable records skipped: " << bad_records << '\n';
  }
};

inline int fail(const Error& e, Streams io) {
  io.err << "nprint: " << e.what() << '\n';
  return e.exit_code();
}

/// Parses argv with CLI11, mapping its errors onto our usage exit code.
/// Returns nullopt on success.
inline std::optional<int> parse_args(CLI::App& app, const std::vector<std::string>& args, Streams io) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    io.err << "nprint: " << e.what() << "\nTry '--help' for more information.\n";
    return static_cast<int>(ErrorKind::usage);
  }
  return std::nullopt;
}

inline int run_reverse(const std::string& rows_path, const std::string& out_path, const EncodeFlags& flags,
                       Streams io) {
  if (out_path.empty()) throw usage_error("-N requires -W <file.pcap> for the reconstructed capture");
  if (flags.fill == 0 || flags.fill == 1) throw usage_error("cannot reverse rows encoded with fill 0 or 1");
  std::ifstream in(rows_path);
  if (!in) throw io_error("cannot open '" + rows_path + "'");
  CsvReader reader(in, static_cast<std::int8_t>(flags.fill));
  const auto& schema = reader.schema();
  if (!schema.config) {
    throw format_error("'" + rows_path + "' does not carry a complete section layout (bit-filtered rows cannot be reversed)");
  }
  PcapDecoder decoder(Layout(*schema.config), static_cast<std::int8_t>(flags.fill), out_path);
  FingerprintRow row;
  std::size_t line = 1;
  while (reader.next(row)) {
    ++line;
    if (auto why = decoder.push(row); why && flags.verbose) io.err << "row " << line << " rejected: " << *why << '\n';
  }
  decoder.close();
  if (flags.stats) {
    const auto& s = decoder.stats();
    io.err << "rows decoded: " << s.decoded << '\n'
           << "rows with no packet (all fill): " << s.empty << '\n'
           << "rows rejected as corrupt: " << s.corrupt << '\n'
           << "rows rejected while reading: " << reader.rejected() << '\n';
  }
  return 0;
}

/// Encodes every packet of `source` into `writer`.
inline void encode_source(PacketSource& source, const CaptureFilter* filter, std::optional<std::size_t> limit,
                          Encoder& encoder, CsvWriter& writer, EncodeTotals& totals, bool verbose, Streams io) {
  PacketStream stream(source, filter, limit);
  ParsedPacket pkt;
  FingerprintRow row;
  while (stream.next(pkt)) {
    if (verbose) io.err << describe(pkt) << '\n';
    if (!encoder.encode(pkt, row)) continue;
    if (verbose) io.err << describe(row) << '\n';
    writer.write(row);
  }
  totals.add(stream.stats(), source.stats());
}

inline int run_nprint(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"nprint", "nprint"};
  app.set_help_flag();
  EncodeFlags flags;
  flags.add_to(app);
  std::string pcap_file, csv_file, device, nprint_file, write_file;
  long count = 0;
  bool filter_help = false, help = false, usage = false, version = false;
  app.add_option("-P,--pcap_file", pcap_file);
  app.add_option("-C,--csv_file", csv_file);
  app.add_option("-d,--device", device);
  app.add_option("-N,--nPrint_file", nprint_file);
  app.add_option("-W,--write_file", write_file);
  app.add_option("-c,--count", count)->check(CLI::PositiveNumber);
  app.add_flag("-h,--nprint_filter_help", filter_help);
  app.add_flag("-?,--help", help);
  app.add_flag("--usage", usage);
  app.add_flag("--version", version);
  if (auto code = parse_args(app, args, io)) return *code;

  if (help) {
    io.out << kNprintHelp;
    return 0;
  }
  if (usage) {
    io.out << kNprintUsage;
    return 0;
  }
  if (version) {
    io.out << kVersion << '\n';
    return 0;
  }

  try {
    EncodingConfig config = flags.config();
    if (filter_help) {
      EncodingConfig listing = config;
      if (!listing.any_section()) {
        for (Section s : kCanonicalOrder) listing.enable(s);
      }
      for (const auto& name : Layout(listing).bit_column_names()) io.out << name << '\n';
      return 0;
    }

    int inputs = !pcap_file.empty() + !csv_file.empty() + !nprint_file.empty() + !device.empty();
    if (inputs != 1) throw usage_error("exactly one input is required: -P, -C, -N or -d");
    if (!nprint_file.empty()) return run_reverse(nprint_file, write_file, flags, io);
    if (config.degenerate()) throw usage_error("nothing to emit: enable at least one header, payload or timestamp");

    auto filter = flags.capture_filter();
    std::optional<std::size_t> limit;
    if (count > 0) limit = static_cast<std::size_t>(count);
    Encoder encoder(config);
    EncodeTotals totals;
    const CaptureFilter* fp = filter ? &*filter : nullptr;

    // Open the first input before any output so a bad path leaves no header behind.
    std::vector<std::filesystem::path> files;
    std::unique_ptr<PacketSource> source;
    if (!pcap_file.empty()) {
      if (std::filesystem::is_directory(pcap_file)) files = list_capture_files(pcap_file);
      else files.emplace_back(pcap_file);
      if (!files.empty()) source = open_pcap(files.front());
    } else if (!csv_file.empty()) {
      source = open_hex_dump(csv_file);
    } else {
      source = std::make_unique<LiveCapture>(device);
    }

    OutputSink sink(write_file, io.out);
    CsvWriter writer(sink.stream(), encoder.column_names());
    for (std::size_t i = 0; source; ++i) {
      std::optional<std::size_t> remaining;
      if (limit) remaining = *limit - (totals.read - totals.filtered_out);
      encode_source(*source, fp, remaining, encoder, writer, totals, flags.verbose, io);
      source.reset();
      if (i + 1 < files.size() && !(limit && totals.read - totals.filtered_out >= *limit)) {
        source = open_pcap(files[i + 1]);
      }
    }
    writer.flush();
    totals.encoded = encoder.stats().encoded;
    totals.malformed = encoder.stats().malformed;
    if (flags.stats) totals.print(io.err);
    return 0;
  } catch (const Error& e) {
    return fail(e, io);
  }
}

/// Describes the matrix columns so the model stage can map importances back
/// to (packet slot, section, field, bit).
inline nlohmann::json layout_metadata(const Encoder& encoder, std::size_t sample_size) {
  const auto& config = encoder.config();
  const auto& layout = encoder.layout();
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& slice : layout.sections()) {
    nlohmann::json fields = nlohmann::json::array();
    if (slice.section == Section::payload) {
      fields.push_back({{"name", "payload"}, {"prefix", "payload"}, {"start", slice.bits.start},
                        {"width", slice.bits.width}});
    } else {
      for (const auto& f : fields_of(slice.section)) {
        fields.push_back({{"name", f.name},
                          {"prefix", column_prefix(slice.section, f)},
                          {"start", slice.bits.start + f.wire_bit_offset},
                          {"width", f.bit_width}});
      }
    }
    sections.push_back({{"name", section_name(slice.section)},
                        {"start", slice.bits.start},
                        {"width", slice.bits.width},
                        {"fields", fields}});
  }
  return {
      {"sample_size", sample_size},
      {"fill", config.fill},
      {"index", index_column_name(config.index_mode)},
      {"absolute_ts", config.absolute_ts},
      {"relative_ts", config.relative_ts},
      {"payload_bytes", config.payload_bytes},
      {"packet_width", layout.width()},
      {"sections", sections},
      {"bit_columns", encoder.bit_column_names()},
  };
}

inline std::size_t worker_count() {
  if (const char* env = std::getenv("NPRINT_WORKERS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::optional<std::string> find_harness(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("NPRINTML_HARNESS"); env && *env) return std::string(env);
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    auto candidate = std::filesystem::path(dir) / "nprintml-harness";
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return std::nullopt;
}

inline int run_harness(const std::string& harness, const std::vector<std::string>& argv) {
  std::vector<char*> cargv;
  cargv.push_back(const_cast<char*>(harness.c_str()));
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  pid_t pid = ::fork();
  if (pid < 0) throw io_error("cannot start model stage");
  if (pid == 0) {
    ::execvp(cargv[0], cargv.data());
    std::_Exit(127);
  }
  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) throw io_error("lost model stage process");
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128;
}

inline int run_nprintml(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"nprintml", "nprintml"};
  app.set_help_flag();
  EncodeFlags flags;
  flags.add_to(app);
  std::string label_file, aggregator, pcap_file, pcap_dir, write_file = "nprint_matrix.csv";
  std::string report_dir = "nprintml_report", harness;
  long sample_size = 1;
  bool drop_partial = false, matrix_only = false, help = false, version = false;
  app.add_option("-L,--label_file", label_file);
  app.add_option("-a,--aggregator", aggregator);
  app.add_option("-P,--pcap_file", pcap_file);
  app.add_option("--pcap-dir,--pcap_dir", pcap_dir);
  app.add_option("-c,--sample_size", sample_size)->check(CLI::PositiveNumber);
  app.add_flag("--drop-partial,--drop_partial", drop_partial);
  app.add_option("-W,--write_file", write_file);
  app.add_option("--report_dir", report_dir);
  app.add_flag("--matrix-only", matrix_only);
  app.add_option("--harness", harness);
  app.add_flag("-?,--help", help);
  app.add_flag("--version", version);
  if (auto code = parse_args(app, args, io)) return *code;
  if (help) {
    io.out << kNprintmlHelp;
    return 0;
  }
  if (version) {
    io.out << kVersion << '\n';
    return 0;
  }

  try {
    if (label_file.empty()) throw usage_error("a label file is required (-L)");
    auto mode = assemble_mode_from(aggregator);
    if (!mode) throw usage_error("-a must be 'index' or 'pcap'");
    if (pcap_file.empty() == pcap_dir.empty()) throw usage_error("exactly one of -P or --pcap-dir is required");
    EncodingConfig config = flags.config();
    if (!config.any_section()) throw usage_error("enable at least one header or payload");
    auto filter = flags.capture_filter();
    const CaptureFilter* fp = filter ? &*filter : nullptr;
    LabelTable labels = LabelTable::load(label_file);
    const std::size_t n = static_cast<std::size_t>(sample_size);

    std::vector<std::filesystem::path> files;
    if (!pcap_dir.empty()) files = list_capture_files(pcap_dir);
    else files.emplace_back(pcap_file);

    Encoder prototype(config);
    const std::size_t width = prototype.output_width();
    std::vector<Sample> samples;
    EncodeTotals totals;
    std::size_t dropped_partial = 0;

    if (*mode == AssembleMode::pcap) {
      // Files are independent samples; encode them in parallel and keep file order.
      std::vector<std::optional<Sample>> results(files.size());
      std::atomic<std::size_t> next{0};
      std::mutex mu;
      std::exception_ptr failure;
      auto work = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
          try {
            Encoder encoder(config);
            Assembler assembler(n, AssembleMode::pcap, width, config.fill, drop_partial);
            PcapReader reader(files[i]);
            PacketStream stream(reader, fp);
            ParsedPacket pkt;
            FingerprintRow row;
            std::string key = files[i].string();
            std::optional<Sample> sample;
            while (!sample && stream.next(pkt)) {
              if (encoder.encode(pkt, row)) sample = assembler.push(key, row);
            }
            if (!sample) sample = assembler.finish_group(key);
            std::lock_guard lock(mu);
            totals.add(stream.stats(), reader.stats());
            totals.encoded += encoder.stats().encoded;
            totals.malformed += encoder.stats().malformed;
            dropped_partial += assembler.dropped_partial();
            results[i] = std::move(sample);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      for (std::size_t w = 1; w < std::min(worker_count(), files.size()); ++w) pool.emplace_back(work);
      work();
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);
      for (auto& r : results) {
        if (r) samples.push_back(std::move(*r));
      }
    } else {
      Assembler assembler(n, AssembleMode::index, width, config.fill, drop_partial);
      for (const auto& f : files) {
        Encoder encoder(config);
        PcapReader reader(f);
        PacketStream stream(reader, fp);
        ParsedPacket pkt;
        FingerprintRow row;
        while (stream.next(pkt)) {
          if (!encoder.encode(pkt, row)) continue;
          std::string key = row.index_key;
          if (auto s = assembler.push(key, std::move(row))) samples.push_back(std::move(*s));
        }
        totals.add(stream.stats(), reader.stats());
        totals.encoded += encoder.stats().encoded;
        totals.malformed += encoder.stats().malformed;
      }
      for (auto& s : assembler.finish()) samples.push_back(std::move(s));
      dropped_partial = assembler.dropped_partial();
    }

    auto joined = join_labels(std::move(samples), labels);
    if (flags.stats) {
      totals.print(io.err);
      io.err << "samples dropped as partial: " << dropped_partial << '\n'
             << "samples without a label: " << joined.dropped << '\n'
             << "labeled samples: " << joined.samples.size() << '\n';
    }
    if (joined.samples.empty()) {
      throw format_error("no labeled samples to write (" + std::to_string(totals.encoded) + " packets encoded, " +
                         std::to_string(joined.dropped) + " samples had no label); check -L keys, -a and -f");
    }

    auto bit_columns = prototype.bit_column_names();
    {
      std::ofstream out(write_file, std::ios::binary);
      if (!out) throw io_error("cannot open '" + write_file + "' for writing");
      emit_matrix(joined.samples, out, n, bit_columns, config.absolute_ts, config.relative_ts, config.fill);
    }
    const std::string layout_path = write_file + ".layout.json";
    {
      std::ofstream out(layout_path);
      if (!out) throw io_error("cannot open '" + layout_path + "' for writing");
      out << layout_metadata(prototype, n).dump(2) << '\n';
      if (!out) throw io_error("write to '" + layout_path + "' failed");
    }
    io.err << "wrote " << joined.samples.size() << " samples to " << write_file << '\n';

    if (matrix_only) return 0;
    auto stage = find_harness(harness);
    if (!stage) {
      io.err << "model stage not installed; stopping after the feature matrix\n";
      return 0;
    }
    io.err << "running model stage: " << *stage << '\n';
    return run_harness(*stage, {"--matrix", write_file, "--layout", layout_path, "--output", report_dir});
  } catch (const Error& e) {
    return fail(e, io);
  }
}

/// Dispatches on the verb: `nprint ...`, `nprintml ...`, or (no verb) nprint.
/// A program name ending in `nprintml` selects that verb directly.
inline int run(int argc, char** argv, Streams io) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string prog = argc > 0 ? std::filesystem::path(argv[0]).filename().string() : "nprint";
  if (prog == "nprintml") return run_nprintml(args, io);
  if (!args.empty() && args.front() == "nprintml") return run_nprintml({args.begin() + 1, args.end()}, io);
  if (!args.empty() && args.front() == "nprint") return run_nprint({args.begin() + 1, args.end()}, io);
  return run_nprint(args, io);
}

}  // namespace nprint::cli
