// Writes the synthetic plane story: corpus.ndjson, config.json, manifest.json.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "support/plane_fixture.hpp"
#include "trails/domain.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  const auto fx = trails::testkit::make_plane_fixture();

  std::ofstream corpus(dir / "corpus.ndjson", std::ios::binary);
  for (const auto& r : fx.records) corpus << trails::serialize_record(r).dump() << "\n";
  std::ofstream(dir / "config.json", std::ios::binary) << fx.config_json;

  const auto& m = fx.manifest;
  nlohmann::json man = {
      {"investigative_tweet_id", std::to_string(m.investigative_tweet_id)},
      {"originator", {{"tweet_id", std::to_string(m.originator_id)},
                      {"screen_name", m.originator_screen_name},
                      {"retweet_count", m.originator_retweet_count}}},
      {"break_bin_start", trails::format_iso8601(m.break_bin_start)},
      {"first_negation_bin", trails::format_iso8601(m.first_negation_bin)},
      {"relevant_count", m.relevant_count},
      {"propagation_h", m.propagation_h},
      {"negation_h", m.negation_h},
      {"non_negation_h", m.non_negation_h},
      {"still_spreading", m.still_spreading},
  };
  std::ofstream(dir / "manifest.json", std::ios::binary) << man.dump(2) << "\n";
  std::cout << fx.records.size() << " tweets written to " << dir.string() << "\n";
  return 0;
}
