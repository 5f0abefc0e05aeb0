#pragma once

// Investigation lifecycle: creation from an investigative tweet, refinement
// (full recompute), dataset access, the story gallery, and on-disk
// persistence with atomic artifact replacement.
//
// Store layout, one directory per investigation:
//   <store>/<id>/investigation.json   record: config, state, generation
//   <store>/<id>/gen-<n>/<kind>.json  artifacts of generation n
// A refine writes a complete new generation directory, then atomically
// renames a fresh investigation.json over the old one. Readers never see a
// half-written generation.

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trails/pipeline.hpp"

namespace trails {

namespace fs = std::filesystem;

/// Writes `contents` to `path` via a synced temporary and rename(2).
inline void write_file_atomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
  std::size_t off = 0;
  while (off < contents.size()) {
    const auto n = ::write(fd, contents.data() + off, contents.size() - off);
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorKind::io, "short write to '" + tmp.string() + "'");
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
  if (const int dfd = ::open(path.parent_path().c_str(), O_RDONLY | O_DIRECTORY); dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Canonical byte form of a served document.
inline std::string dump_document(const nlohmann::json& j) { return j.dump(2) + "\n"; }

enum class InvestigationState { draft, computed, error };

inline std::string_view to_string(InvestigationState s) {
  switch (s) {
    case InvestigationState::draft: return "draft";
    case InvestigationState::computed: return "computed";
    case InvestigationState::error: return "error";
  }
  return "?";
}

inline InvestigationState parse_state(std::string_view s) {
  if (s == "computed") return InvestigationState::computed;
  if (s == "error") return InvestigationState::error;
  return InvestigationState::draft;
}

enum class StoryView { condensed, full };

struct Investigation {
  std::string id;
  std::string corpus_ref;
  InvestigationConfig config;
  InvestigationState state = InvestigationState::draft;
  std::optional<Category> category;
  Timestamp created_at;
  Timestamp updated_at;
  std::uint64_t generation = 0;
  std::string investigative_text;
  std::string error_message;
};

class InvestigationService {
 public:
  /// `store_dir` may be empty for a purely in-memory service.
  InvestigationService(std::shared_ptr<const Corpus> corpus, std::string corpus_ref,
                       fs::path store_dir = {}, AnalysisParams params = {})
      : corpus_(std::move(corpus)),
        corpus_ref_(std::move(corpus_ref)),
        store_(std::move(store_dir)),
        params_(std::move(params)) {
    if (!store_.empty()) {
      fs::create_directories(store_);
      load_store();
    }
  }

  [[nodiscard]] const Corpus& corpus() const { return *corpus_; }
  [[nodiscard]] const std::string& corpus_ref() const { return corpus_ref_; }
  [[nodiscard]] const AnalysisParams& params() const { return params_; }

  /// New draft investigation seeded by `tweet_id`. An empty `corpus_ref`
  /// means the service's own corpus.
  Investigation create_investigation(std::string_view corpus_ref, TweetId tweet_id) {
    if (!corpus_ref.empty() && corpus_ref != corpus_ref_) {
      throw Error(ErrorKind::not_found, "unknown corpus '" + std::string(corpus_ref) + "'");
    }
    const auto* tweet = corpus_->find(tweet_id);
    if (!tweet) throw Error(ErrorKind::not_found, "tweet " + std::to_string(tweet_id) + " not in corpus");
    auto entry = std::make_shared<Entry>();
    entry->record.id = fresh_id();
    entry->record.corpus_ref = corpus_ref_;
    entry->record.config.investigative_tweet_id = tweet_id;
    entry->record.investigative_text = tweet->text;
    entry->record.created_at = entry->record.updated_at = wall_clock();
    persist_record(entry->record);
    std::unique_lock lock(map_mutex_);
    entries_.emplace(entry->record.id, entry);
    return entry->record;
  }

  [[nodiscard]] Investigation get(const std::string& id) const {
    const auto entry = lookup(id);
    std::shared_lock lock(entry->mutex);
    return entry->record;
  }

  /// Merges `patch` into the config, recomputes everything and swaps the
  /// artifacts in. Refinements of one investigation run one at a time, in
  /// arrival order; a failed validation leaves the previous state intact.
  Investigation refine(const std::string& id, const nlohmann::json& patch) {
    const auto entry = lookup(id);
    std::lock_guard serial(entry->refine_mutex);
    Investigation next = get(id);
    if (!patch.is_object()) throw Error(ErrorKind::validation, "patch must be an object");
    nlohmann::json filter_patch = patch;
    if (const auto it = filter_patch.find("category"); it != filter_patch.end()) {
      if (it->is_null()) {
        next.category.reset();
      } else if (const auto c = it->is_string() ? parse_category(it->get<std::string>()) : std::nullopt) {
        next.category = *c;
      } else {
        throw Error(ErrorKind::validation,
                    "category must be rumor_true, rumor_false, event_meme, other or null");
      }
      filter_patch.erase(it);
    }
    next.config = doc::apply_config_patch(next.config, filter_patch);
    validate(next.config);
    if (!corpus_->find(next.config.investigative_tweet_id)) {
      throw Error(ErrorKind::validation, "investigative tweet is not in the corpus");
    }

    auto artifacts = std::make_shared<const Artifacts>(
        run_pipeline(*corpus_, next.config, params_, next.category));
    auto docs = render(*artifacts);

    next.state = InvestigationState::computed;
    next.generation += 1;
    next.updated_at = std::max(wall_clock(), next.updated_at.plus(1));
    next.error_message.clear();
    persist_generation(next, docs);

    {
      std::unique_lock lock(entry->mutex);
      const auto old_generation = entry->record.generation;
      entry->record = next;
      entry->docs = std::move(docs);
      entry->artifacts = std::move(artifacts);
      if (!store_.empty() && old_generation != 0 && old_generation != next.generation) {
        std::error_code ec;
        fs::remove_all(generation_dir(id, old_generation), ec);
      }
    }
    return next;
  }

  /// Serialized artifact of a computed investigation.
  [[nodiscard]] std::string dataset(const std::string& id, std::string_view kind) const {
    if (!is_dataset_kind(kind)) {
      std::string valid;
      for (const auto k : kDatasetKinds) valid += (valid.empty() ? "" : ", ") + std::string(k);
      throw Error(ErrorKind::invalid_argument,
                  "unknown dataset kind '" + std::string(kind) + "'; valid kinds: " + valid);
    }
    const auto entry = lookup(id);
    std::shared_lock lock(entry->mutex);
    if (entry->record.state != InvestigationState::computed) {
      throw Error(ErrorKind::conflict, "investigation " + id + " is " +
                                           std::string(to_string(entry->record.state)) +
                                           "; datasets exist only once computed");
    }
    return entry->docs.at(std::string(kind));
  }

  /// Tweets of one timeline bin, sorted for the bin pane.
  [[nodiscard]] std::vector<TweetRecord> bin_tweets(const std::string& id, Timestamp start,
                                                    BinSortKey key, SortOrder order) {
    return list_bin(artifacts(id)->relevant, start, key, order);
  }

  [[nodiscard]] KeywordRating rate(const std::string& id, std::string_view term) const {
    const auto inv = get(id);
    if (text::Pattern(term).empty()) throw Error(ErrorKind::invalid_argument, "empty term");
    return rate_keyword(*corpus_, term, *corpus_->find(inv.config.investigative_tweet_id),
                        params_.window);
  }

  [[nodiscard]] std::vector<KeywordSuggestion> suggest(const std::string& id, std::size_t k) const {
    const auto inv = get(id);
    if (k == 0) throw Error(ErrorKind::invalid_argument, "k must be positive");
    return suggest_keywords(*corpus_, *corpus_->find(inv.config.investigative_tweet_id), inv.config,
                            k, params_.window);
  }

  [[nodiscard]] nlohmann::json investigation_document(const std::string& id) const {
    const auto entry = lookup(id);
    std::shared_lock lock(entry->mutex);
    return describe(*entry, StoryView::full);
  }

  /// Gallery rows ordered by investigation id.
  [[nodiscard]] nlohmann::json list_stories(StoryView view) const {
    std::vector<std::shared_ptr<Entry>> all;
    {
      std::shared_lock lock(map_mutex_);
      for (const auto& [_, e] : entries_) all.push_back(e);
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : all) {
      std::shared_lock lock(e->mutex);
      out.push_back(describe(*e, view));
    }
    return out;
  }

  /// (story id, metrics) for every computed investigation.
  [[nodiscard]] std::vector<std::pair<std::string, StoryMetrics>> computed_metrics() const {
    std::vector<std::pair<std::string, StoryMetrics>> out;
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, e] : entries_) {
      std::shared_lock elock(e->mutex);
      if (e->record.state != InvestigationState::computed) continue;
      out.emplace_back(id, doc::metrics_from_json(nlohmann::json::parse(e->docs.at("metrics"))));
    }
    return out;
  }

  /// Renders artifact documents in their canonical byte form.
  static std::map<std::string, std::string> render(const Artifacts& a) {
    std::map<std::string, std::string> out;
    for (const auto& [kind, d] : artifact_documents(a)) out.emplace(kind, dump_document(d));
    return out;
  }

 private:
  struct Entry {
    mutable std::shared_mutex mutex;  // guards record, docs, artifacts
    std::mutex refine_mutex;          // serializes refinements
    Investigation record;
    std::map<std::string, std::string> docs;
    std::shared_ptr<const Artifacts> artifacts;
  };

  std::shared_ptr<Entry> lookup(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    const auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(ErrorKind::not_found, "no investigation '" + id + "'");
    return it->second;
  }

  // In-memory artifacts, recomputed from the stored config after a restart.
  std::shared_ptr<const Artifacts> artifacts(const std::string& id) {
    const auto entry = lookup(id);
    std::lock_guard serial(entry->refine_mutex);
    {
      std::shared_lock lock(entry->mutex);
      if (entry->record.state != InvestigationState::computed) {
        throw Error(ErrorKind::conflict, "investigation " + id + " is not computed");
      }
      if (entry->artifacts) return entry->artifacts;
    }
    auto rebuilt = std::make_shared<const Artifacts>(
        run_pipeline(*corpus_, entry->record.config, params_, entry->record.category));
    std::unique_lock lock(entry->mutex);
    entry->artifacts = rebuilt;
    return rebuilt;
  }

  nlohmann::json describe(const Entry& e, StoryView view) const {
    const auto& r = e.record;
    nlohmann::json row = {{"id", r.id},
                          {"state", to_string(r.state)},
                          {"investigative_tweet_id", doc::id(r.config.investigative_tweet_id)},
                          {"investigative_text", r.investigative_text},
                          {"category", r.category ? nlohmann::json(to_string(*r.category)) : nlohmann::json(nullptr)}};
    if (r.state == InvestigationState::computed) {
      const auto metrics = nlohmann::json::parse(e.docs.at("metrics"));
      row["propagation_h"] = metrics["propagation_h"];
      row["propagation_level"] = metrics["propagation_level"];
      row["skepticism"] = metrics["skepticism"];
    }
    if (view == StoryView::condensed) return row;
    row["corpus"] = r.corpus_ref;
    row["config"] = doc::to_json(r.config);
    row["created_at"] = format_iso8601(r.created_at);
    row["updated_at"] = format_iso8601(r.updated_at);
    row["generation"] = r.generation;
    if (!r.error_message.empty()) row["error"] = r.error_message;
    if (r.state == InvestigationState::computed) {
      row["summary"] = nlohmann::json::parse(e.docs.at("summary"));
      nlohmann::json links = nlohmann::json::object();
      for (const auto k : kDatasetKinds) {
        links[std::string(k)] = "/investigations/" + r.id + "/datasets/" + std::string(k);
      }
      row["datasets"] = links;
    }
    return row;
  }

  static Timestamp wall_clock() {
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count()};
  }

  std::string fresh_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[32];
    const auto seq = counter_.fetch_add(1);
    std::snprintf(buf, sizeof buf, "inv-%04llx%08llx", static_cast<unsigned long long>(seq & 0xffff),
                  static_cast<unsigned long long>(rng() & 0xffffffffULL));
    return buf;
  }

  // --- persistence -------------------------------------------------------

  fs::path generation_dir(const std::string& id, std::uint64_t gen) const {
    return store_ / id / ("gen-" + std::to_string(gen));
  }

  static nlohmann::json record_json(const Investigation& r) {
    return {{"id", r.id},
            {"corpus", r.corpus_ref},
            {"config", doc::to_json(r.config)},
            {"state", to_string(r.state)},
            {"category", r.category ? nlohmann::json(to_string(*r.category)) : nlohmann::json(nullptr)},
            {"created_at", format_iso8601(r.created_at)},
            {"updated_at", format_iso8601(r.updated_at)},
            {"generation", r.generation},
            {"investigative_text", r.investigative_text}};
  }

  void persist_record(const Investigation& r) const {
    if (store_.empty()) return;
    fs::create_directories(store_ / r.id);
    write_file_atomic(store_ / r.id / "investigation.json", dump_document(record_json(r)));
  }

  void persist_generation(const Investigation& r,
                          const std::map<std::string, std::string>& docs) const {
    if (store_.empty()) return;
    const auto dir = generation_dir(r.id, r.generation);
    std::error_code ec;
    fs::remove_all(dir, ec);  // leftovers of an interrupted refine
    fs::create_directories(dir);
    for (const auto& [kind, body] : docs) write_file_atomic(dir / (kind + ".json"), body);
    persist_record(r);
  }

  void load_store() {
    for (const auto& dirent : fs::directory_iterator(store_)) {
      if (!dirent.is_directory()) continue;
      const auto meta = dirent.path() / "investigation.json";
      if (!fs::exists(meta)) continue;
      auto entry = std::make_shared<Entry>();
      auto& r = entry->record;
      try {
        const auto j = nlohmann::json::parse(read_file(meta));
        r.id = j.at("id").get<std::string>();
        r.corpus_ref = j.value("corpus", std::string());
        r.config = doc::config_from_json(j.at("config"));
        r.state = parse_state(j.value("state", std::string("draft")));
        if (j.contains("category") && j["category"].is_string()) {
          r.category = parse_category(j["category"].get<std::string>());
        }
        r.created_at = parse_iso8601(j.value("created_at", std::string())).value_or(Timestamp{});
        r.updated_at = parse_iso8601(j.value("updated_at", std::string())).value_or(Timestamp{});
        r.generation = j.value("generation", std::uint64_t{0});
        r.investigative_text = j.value("investigative_text", std::string());
        if (r.state == InvestigationState::computed) {
          for (const auto kind : kDatasetKinds) {
            const auto file = generation_dir(r.id, r.generation) / (std::string(kind) + ".json");
            entry->docs.emplace(std::string(kind), read_file(file));
          }
        }
      } catch (const std::exception& ex) {
        r.id = dirent.path().filename().string();
        r.state = InvestigationState::error;
        r.error_message = ex.what();
        entry->docs.clear();
      }
      // Other generations belong to a refine that never committed. An
      // unreadable record keeps everything for inspection.
      for (const auto& sub : fs::directory_iterator(dirent.path())) {
        if (r.state == InvestigationState::error) break;
        const auto name = sub.path().filename().string();
        if (sub.is_directory() && name.rfind("gen-", 0) == 0 &&
            name != "gen-" + std::to_string(r.generation)) {
          std::error_code ec;
          fs::remove_all(sub.path(), ec);
        }
      }
      entries_.emplace(r.id, entry);
    }
  }

  std::shared_ptr<const Corpus> corpus_;
  std::string corpus_ref_;
  fs::path store_;
  AnalysisParams params_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::atomic<std::uint64_t> counter_{0};
};

/// Scatter rows for every computed investigation persisted in `store_dir`.
inline std::vector<ScatterRow> scatter_from_store(const fs::path& store_dir) {
  std::vector<std::pair<std::string, StoryMetrics>> stories;
  if (!fs::exists(store_dir)) throw Error(ErrorKind::io, "no store at '" + store_dir.string() + "'");
  for (const auto& dirent : fs::directory_iterator(store_dir)) {
    const auto meta = dirent.path() / "investigation.json";
    if (!dirent.is_directory() || !fs::exists(meta)) continue;
    const auto j = nlohmann::json::parse(read_file(meta));
    if (j.value("state", std::string()) != "computed") continue;
    const auto gen = j.value("generation", std::uint64_t{0});
    const auto metrics = nlohmann::json::parse(
        read_file(dirent.path() / ("gen-" + std::to_string(gen)) / "metrics.json"));
    stories.emplace_back(j.at("id").get<std::string>(), doc::metrics_from_json(metrics));
  }
  return scatter_export(std::move(stories));
}

}  // namespace trails
