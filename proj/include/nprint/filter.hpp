#pragma once

// Built-in capture filter covering the subset of the pcap filter language that
// traffic-analysis command lines actually use:
//
//   expr    := or
//   or      := and (("or" | "||") and)*
//   and     := unary (("and" | "&&") unary)*
//   unary   := ("not" | "!") unary | primary
//   primary := "(" expr ")"
//            | proto "[" number "]" ["&" number] relop number
//            | proto
//            | "port" number
//            | "host" address
//   proto   := "ip" | "ip6" | "tcp" | "udp" | "icmp"
//   relop   := "==" | "=" | "!=" | "<" | ">" | "<=" | ">="
//
// Byte offsets are relative to the start of the named header. A test against
// a header the packet does not carry is false.

#include <arpa/inet.h>

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nprint/error.hpp"
#include "nprint/packet.hpp"

namespace nprint {

class CaptureFilter {
 public:
  /// Parses `expression`; throws a usage Error on any syntax error.
  static CaptureFilter compile(std::string_view expression) {
    CaptureFilter f;
    f.expression_ = std::string(expression);
    Parser parser{f.expression_, f.nodes_};
    f.root_ = parser.parse();
    return f;
  }

  bool matches(const ParsedPacket& pkt) const { return eval(root_, pkt); }

  const std::string& expression() const { return expression_; }

 private:
  enum class Op : std::uint8_t { proto, byte_test, port, host, and_, or_, not_ };
  enum class Rel : std::uint8_t { eq, ne, lt, gt, le, ge };

  struct Node {
    Op op;
    Section section = Section::payload;
    std::uint32_t offset = 0;
    std::uint32_t mask = 0xff;
    Rel rel = Rel::eq;
    std::uint32_t value = 0;
    std::vector<std::uint8_t> address{};
    int lhs = -1;
    int rhs = -1;
  };

  struct Parser {
    std::string_view text;
    std::vector<Node>& nodes;
    std::size_t pos = 0;

    int parse() {
      int root = parse_or();
      skip_space();
      if (pos != text.size()) fail("unexpected '" + std::string(text.substr(pos)) + "'");
      return root;
    }

    [[noreturn]] void fail(const std::string& why) const {
      throw usage_error("bad filter expression '" + std::string(text) + "': " + why);
    }

    void skip_space() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::string_view peek_word() {
      skip_space();
      std::size_t end = pos;
      while (end < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '.' ||
              text[end] == ':' || text[end] == '_')) {
        ++end;
      }
      return text.substr(pos, end - pos);
    }

    bool accept(std::string_view token) {
      skip_space();
      if (text.substr(pos, token.size()) != token) return false;
      // Keywords must not run into a following identifier character.
      if (std::isalpha(static_cast<unsigned char>(token.front()))) {
        std::size_t after = pos + token.size();
        if (after < text.size() && std::isalnum(static_cast<unsigned char>(text[after]))) return false;
      }
      pos += token.size();
      return true;
    }

    int add(Node n) {
      nodes.push_back(std::move(n));
      return static_cast<int>(nodes.size() - 1);
    }

    int parse_or() {
      int lhs = parse_and();
      while (accept("or") || accept("||")) {
        int rhs = parse_and();
        lhs = add({.op = Op::or_, .lhs = lhs, .rhs = rhs});
      }
      return lhs;
    }

    int parse_and() {
      int lhs = parse_unary();
      while (accept("and") || accept("&&")) {
        int rhs = parse_unary();
        lhs = add({.op = Op::and_, .lhs = lhs, .rhs = rhs});
      }
      return lhs;
    }

    int parse_unary() {
      skip_space();
      if (accept("not")) return add({.op = Op::not_, .lhs = parse_unary()});
      if (pos < text.size() && text[pos] == '!' && text.substr(pos, 2) != "!=") {
        ++pos;
        return add({.op = Op::not_, .lhs = parse_unary()});
      }
      return parse_primary();
    }

    std::uint32_t parse_number() {
      std::string_view word = peek_word();
      if (word.empty()) fail("expected a number");
      std::uint64_t value = 0;
      std::size_t i = 0;
      int base = 10;
      if (word.size() > 2 && word[0] == '0' && (word[1] == 'x' || word[1] == 'X')) {
        base = 16;
        i = 2;
      }
      for (; i < word.size(); ++i) {
        int digit;
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(word[i])));
        if (c >= '0' && c <= '9') {
          digit = c - '0';
        } else if (base == 16 && c >= 'a' && c <= 'f') {
          digit = c - 'a' + 10;
        } else {
          fail("bad number '" + std::string(word) + "'");
        }
        value = value * static_cast<unsigned>(base) + static_cast<unsigned>(digit);
        if (value > 0xffffffffu) fail("number out of range '" + std::string(word) + "'");
      }
      pos += word.size();
      return static_cast<std::uint32_t>(value);
    }

    Rel parse_rel() {
      skip_space();
      if (accept("==")) return Rel::eq;
      if (accept("!=")) return Rel::ne;
      if (accept("<=")) return Rel::le;
      if (accept(">=")) return Rel::ge;
      if (accept("=")) return Rel::eq;
      if (accept("<")) return Rel::lt;
      if (accept(">")) return Rel::gt;
      fail("expected a comparison operator");
    }

    int parse_primary() {
      skip_space();
      if (accept("(")) {
        int inner = parse_or();
        if (!accept(")")) fail("missing ')'");
        return inner;
      }
      std::string_view word = peek_word();
      if (word == "port") {
        pos += word.size();
        std::uint32_t port = parse_number();
        if (port > 0xffff) fail("port out of range");
        return add({.op = Op::port, .value = port});
      }
      if (word == "host") {
        pos += word.size();
        std::string addr{peek_word()};
        pos += addr.size();
        Node n{.op = Op::host};
        std::uint8_t buf[16];
        if (inet_pton(AF_INET, addr.c_str(), buf) == 1) {
          n.address.assign(buf, buf + 4);
        } else if (inet_pton(AF_INET6, addr.c_str(), buf) == 1) {
          n.address.assign(buf, buf + 16);
        } else {
          fail("bad host address '" + addr + "'");
        }
        return add(std::move(n));
      }
      std::optional<Section> section;
      if (word == "ip") section = Section::ipv4;
      else if (word == "ip6") section = Section::ipv6;
      else if (word == "tcp") section = Section::tcp;
      else if (word == "udp") section = Section::udp;
      else if (word == "icmp") section = Section::icmp;
      if (!section) fail(word.empty() ? "expected an expression" : "unknown keyword '" + std::string(word) + "'");
      pos += word.size();
      if (!accept("[")) return add({.op = Op::proto, .section = *section});
      Node n{.op = Op::byte_test, .section = *section};
      n.offset = parse_number();
      if (!accept("]")) fail("missing ']'");
      skip_space();
      if (pos < text.size() && text[pos] == '&' && text.substr(pos, 2) != "&&") {
        ++pos;
        n.mask = parse_number();
      }
      n.rel = parse_rel();
      n.value = parse_number();
      return add(std::move(n));
    }
  };

  bool eval(int index, const ParsedPacket& pkt) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.op) {
      case Op::proto: return pkt.has(n.section);
      case Op::and_: return eval(n.lhs, pkt) && eval(n.rhs, pkt);
      case Op::or_: return eval(n.lhs, pkt) || eval(n.rhs, pkt);
      case Op::not_: return !eval(n.lhs, pkt);
      case Op::port: {
        auto sp = pkt.src_port();
        auto dp = pkt.dst_port();
        return (sp && *sp == n.value) || (dp && *dp == n.value);
      }
      case Op::host: {
        auto eq = [&](std::span<const std::uint8_t> a) {
          return a.size() == n.address.size() && std::equal(a.begin(), a.end(), n.address.begin());
        };
        return eq(pkt.src_address()) || eq(pkt.dst_address());
      }
      case Op::byte_test: {
        auto header = pkt.bytes(n.section);
        if (!pkt.has(n.section) || n.offset >= header.size()) return false;
        std::uint32_t v = header[n.offset] & n.mask;
        switch (n.rel) {
          case Rel::eq: return v == n.value;
          case Rel::ne: return v != n.value;
          case Rel::lt: return v < n.value;
          case Rel::gt: return v > n.value;
          case Rel::le: return v <= n.value;
          case Rel::ge: return v >= n.value;
        }
      }
    }
    return false;
  }

  std::string expression_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

inline bool eval_filter(const CaptureFilter& filter, const ParsedPacket& pkt) {
  return filter.matches(pkt);
}

}  // namespace nprint
