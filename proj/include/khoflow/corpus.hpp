#pragma once

// Named diagram corpus stored as JSON:
//   {"schema": 1, "diagrams": [{"name": ..., "pd": ..., "description": ...,
//     "hmr_model": ..., "reidemeister_partner": ...,
//     "skein": {"crossing": i, "two_bridge_resolutions": bool}}, ...]}

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "khoflow/diagram.hpp"
#include "khoflow/error.hpp"

namespace khoflow {

struct SkeinFixture {
  std::size_t crossing = 0;
  bool two_bridge_resolutions = false;
};

struct CorpusEntry {
  std::string name;
  std::string pd;
  std::string description;
  std::optional<std::string> hmr_model;
  std::optional<std::string> reidemeister_partner;
  std::optional<SkeinFixture> skein;

  LinkDiagram diagram() const { return parse_pd(pd); }
};

class Corpus {
public:
  static Corpus from_json(const nlohmann::json& doc) {
    Corpus corpus;
    if (!doc.contains("diagrams") || !doc["diagrams"].is_array())
      fail(ErrorKind::InvalidArgument, "corpus needs a 'diagrams' array");
    for (const auto& item : doc["diagrams"]) {
      CorpusEntry e;
      e.name = item.at("name").get<std::string>();
      e.pd = item.at("pd").get<std::string>();
      e.description = item.value("description", "");
      if (item.contains("hmr_model")) e.hmr_model = item["hmr_model"].get<std::string>();
      if (item.contains("reidemeister_partner"))
        e.reidemeister_partner = item["reidemeister_partner"].get<std::string>();
      if (item.contains("skein")) {
        const auto& s = item["skein"];
        e.skein = SkeinFixture{s.at("crossing").get<std::size_t>(), s.value("two_bridge_resolutions", false)};
      }
      corpus.entries_.push_back(std::move(e));
    }
    return corpus;
  }

  static Corpus load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open corpus file " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorKind::InvalidArgument, "corpus file " + path.string() + ": " + ex.what());
    }
    return from_json(doc);
  }

  const std::vector<CorpusEntry>& entries() const noexcept { return entries_; }

  const CorpusEntry& at(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return e;
    fail(ErrorKind::UnknownDiagram, "no corpus diagram named '" + name + "'");
  }

private:
  std::vector<CorpusEntry> entries_;
};

}  // namespace khoflow
