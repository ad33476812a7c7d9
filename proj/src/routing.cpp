#include "mtforge/routing.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

const RouteEntry& RoutingTable::at(const Direction& dir) const {
  auto it = entries.find(dir);
  if (it == entries.end()) throw Error(Errc::UnknownDirection, dir.str());
  return it->second;
}

RoutingTable build_routing_table(const ScoreMatrix& direct, const ScoreMatrix& pivot, const LangCode& pivot_lang) {
  if (direct.scores.size() != pivot.scores.size())
    throw Error(Errc::DirectionSetMismatch, std::to_string(direct.scores.size()) + " direct vs " +
                                                std::to_string(pivot.scores.size()) + " pivot directions");
  RoutingTable table;
  for (const auto& [dir, d] : direct.scores) {
    auto it = pivot.scores.find(dir);
    if (it == pivot.scores.end()) throw Error(Errc::DirectionSetMismatch, dir.str() + " missing from pivot scores");
    RouteEntry entry{std::nullopt, d.score, it->second.score};
    if (!dir.involves(pivot_lang) && entry.bleu_direct < entry.bleu_pivot) entry.pivot = pivot_lang;
    table.entries.emplace(dir, entry);
  }
  return table;
}

std::vector<std::string> route_translate(const Translator& t, const RoutingTable& table,
                                         std::span<const std::string> sentences, const Direction& dir,
                                         const DecodingConfig& cfg) {
  const auto& entry = table.at(dir);
  if (entry.is_direct()) return t.translate(sentences, dir, cfg);
  return pivot_translate(t, sentences, dir.src(), dir.tgt(), *entry.pivot, cfg).output;
}

void write_routing_table(const RoutingTable& table, const fs::path& path) {
  auto out = open_for_writing(path);
  out << "# src\ttgt\tstrategy\tpivot_lang\tbleu_direct\tbleu_pivot\n";
  for (const auto& [dir, e] : table.entries) {
    out << fmt::format("{}\t{}\t{}\t{}\t{:.6f}\t{:.6f}\n", dir.src().str(), dir.tgt().str(),
                       e.is_direct() ? "direct" : "pivot", e.is_direct() ? std::string("-") : e.pivot->str(),
                       e.bleu_direct, e.bleu_pivot);
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

RoutingTable read_routing_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  RoutingTable table;
  std::string line;
  std::uint64_t line_no = 0;
  auto bad = [&](const std::string& why) {
    return Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  auto number = [&](std::string_view f) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) throw bad("bad score '" + std::string(f) + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 6) throw bad("expected 6 fields");
    Direction dir{LangCode{std::string(f[0])}, LangCode{std::string(f[1])}};
    RouteEntry e{std::nullopt, number(f[4]), number(f[5])};
    if (f[2] == "pivot") {
      e.pivot = LangCode(std::string(f[3]));
      if (dir.involves(*e.pivot)) throw bad("pivot language equals an endpoint of " + dir.str());
    } else if (f[2] != "direct") {
      throw bad("strategy must be direct or pivot");
    }
    table.entries.insert_or_assign(dir, e);
  }
  return table;
}

}  // namespace mtforge
