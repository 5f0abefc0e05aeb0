#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "support/plane_fixture.hpp"
#include "trails/http_api.hpp"
#include "trails/service.hpp"

using namespace trails;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Shared {
  testkit::PlaneFixture fx = testkit::make_plane_fixture();
  std::shared_ptr<const Corpus> corpus = std::make_shared<const Corpus>(Corpus::from_records(fx.records));
  json config = json::parse(fx.config_json);
};

const Shared& shared() {
  static const Shared s;
  return s;
}

class TempStore {
 public:
  TempStore() {
    static std::atomic<int> n{0};
    path_ = fs::temp_directory_path() /
            ("trails-store-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path_);
  }
  ~TempStore() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io;
}

json patch_without_tweet() {
  auto p = shared().config;
  p.erase("investigative_tweet_id");
  return p;
}

}  // namespace

TEST(Service, CreateDraft) {
  InvestigationService svc(shared().corpus, "plane");
  const auto tweet = shared().fx.manifest.investigative_tweet_id;
  const auto a = svc.create_investigation("plane", tweet);
  const auto b = svc.create_investigation("", tweet);
  EXPECT_NE(a.id, b.id);
  EXPECT_EQ(a.state, InvestigationState::draft);
  EXPECT_TRUE(a.config.keywords.empty());
  EXPECT_EQ(a.investigative_text, shared().corpus->find(tweet)->text);
  EXPECT_EQ(kind_of([&] { svc.create_investigation("plane", 42); }), ErrorKind::not_found);
  EXPECT_EQ(kind_of([&] { svc.create_investigation("other", tweet); }), ErrorKind::not_found);
}

TEST(Service, DraftGatesDatasetsButNotRatings) {
  InvestigationService svc(shared().corpus, "plane");
  const auto inv = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  EXPECT_EQ(kind_of([&] { (void)svc.dataset(inv.id, "propagation"); }), ErrorKind::conflict);
  try {
    (void)svc.dataset(inv.id, "bogus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    for (const auto k : kDatasetKinds) EXPECT_NE(std::string(e.what()).find(k), std::string::npos);
  }
  EXPECT_GT(svc.rate(inv.id, "avión").sample_size, 0u);
  EXPECT_FALSE(svc.suggest(inv.id, 5).empty());
  EXPECT_EQ(kind_of([&] { (void)svc.get("inv-missing"); }), ErrorKind::not_found);
}

TEST(Service, RefineComputesAndValidates) {
  InvestigationService svc(shared().corpus, "plane");
  const auto inv = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  const auto done = svc.refine(inv.id, patch_without_tweet());
  EXPECT_EQ(done.state, InvestigationState::computed);
  EXPECT_EQ(done.generation, 1u);
  EXPECT_GT(done.updated_at, inv.updated_at);
  const auto summary = json::parse(svc.dataset(inv.id, "summary"));
  EXPECT_EQ(summary["originator"]["screen_name"], "rafaleonortega");
  const auto before = svc.dataset(inv.id, "metrics");

  // Threshold above the optional-keyword count: rejected, state unchanged.
  EXPECT_EQ(kind_of([&] { svc.refine(inv.id, {{"optional_threshold", 3}}); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([&] { svc.refine(inv.id, {{"no_such_key", 1}}); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([&] { svc.refine(inv.id, {{"category", "maybe"}}); }), ErrorKind::validation);
  EXPECT_EQ(svc.get(inv.id).generation, 1u);
  EXPECT_EQ(svc.dataset(inv.id, "metrics"), before);

  // Idempotence.
  std::map<std::string, std::string> first, second;
  for (const auto k : kDatasetKinds) first[std::string(k)] = svc.dataset(inv.id, k);
  svc.refine(inv.id, patch_without_tweet());
  for (const auto k : kDatasetKinds) second[std::string(k)] = svc.dataset(inv.id, k);
  EXPECT_EQ(first, second);
}

TEST(Service, RequiredKeywordRefinementFollowsFilter) {
  InvestigationService svc(shared().corpus, "plane");
  const auto inv = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  svc.refine(inv.id, {{"search_terms", {"avión", "gran canaria"}}});
  const auto loose = json::parse(svc.dataset(inv.id, "metrics"))["story"]["relevant_count"].get<std::size_t>();
  svc.refine(inv.id, {{"keywords", {{{"term", "avión"}, {"role", "required"}}}}});
  const auto strict = json::parse(svc.dataset(inv.id, "metrics"))["story"]["relevant_count"].get<std::size_t>();
  EXPECT_LT(strict, loose);

  // Same answer as the filter applied directly.
  auto config = svc.get(inv.id).config;
  EXPECT_EQ(strict, build_relevant_set(*shared().corpus, config).size());
}

TEST(Service, StoriesListing) {
  InvestigationService svc(shared().corpus, "plane");
  EXPECT_EQ(svc.list_stories(StoryView::condensed), json::array());
  const auto draft = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  const auto inv = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  auto patch = patch_without_tweet();
  patch["category"] = "rumor_false";
  svc.refine(inv.id, patch);
  const auto rows = svc.list_stories(StoryView::condensed);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    if (row["id"] == draft.id) {
      EXPECT_EQ(row["state"], "draft");
      EXPECT_FALSE(row.contains("propagation_level"));
    } else {
      EXPECT_EQ(row["state"], "computed");
      EXPECT_EQ(row["propagation_h"], shared().fx.manifest.propagation_h);
      EXPECT_EQ(row["propagation_level"], "low");
      EXPECT_TRUE(row.contains("skepticism"));
      EXPECT_EQ(row["category"], "rumor_false");
      EXPECT_FALSE(row.contains("summary"));
    }
  }
  const auto full = svc.list_stories(StoryView::full);
  for (const auto& row : full) {
    if (row["id"] == inv.id) {
      EXPECT_TRUE(row.contains("summary"));
      EXPECT_EQ(row["datasets"]["timeline"], "/investigations/" + inv.id + "/datasets/timeline");
    }
  }
}

TEST(Service, PersistsAndReloadsByteIdentical) {
  TempStore store;
  std::string id;
  std::map<std::string, std::string> docs;
  {
    InvestigationService svc(shared().corpus, "plane", store.path());
    id = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id).id;
    svc.refine(id, patch_without_tweet());
    for (const auto k : kDatasetKinds) docs[std::string(k)] = svc.dataset(id, k);
  }
  InvestigationService again(shared().corpus, "plane", store.path());
  EXPECT_EQ(again.get(id).state, InvestigationState::computed);
  for (const auto& [k, body] : docs) EXPECT_EQ(again.dataset(id, k), body) << k;
  // Recomputing from the stored config reproduces the stored bytes.
  const auto fresh = InvestigationService::render(run_pipeline(*shared().corpus, again.get(id).config));
  for (const auto& [k, body] : docs) EXPECT_EQ(fresh.at(k), body) << k;
  // In-memory artifacts are rebuilt on demand after a restart.
  EXPECT_FALSE(again.bin_tweets(id, shared().fx.manifest.break_bin_start, BinSortKey::retweets,
                                SortOrder::desc)
                   .empty());
}

TEST(Service, InterruptedRefineLeavesPreviousArtifacts) {
  TempStore store;
  std::string id;
  std::string metrics;
  {
    InvestigationService svc(shared().corpus, "plane", store.path());
    id = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id).id;
    svc.refine(id, patch_without_tweet());
    metrics = svc.dataset(id, "metrics");
  }
  // A refine that died after writing part of generation 2.
  const auto partial = store.path() / id / "gen-2";
  fs::create_directories(partial);
  std::ofstream(partial / "metrics.json") << "{\"trunc";
  std::ofstream(store.path() / id / "investigation.json.tmp-123") << "{";

  InvestigationService again(shared().corpus, "plane", store.path());
  EXPECT_EQ(again.get(id).generation, 1u);
  EXPECT_EQ(again.dataset(id, "metrics"), metrics);
  EXPECT_FALSE(fs::exists(partial));
}

TEST(Service, ScatterFromStore) {
  TempStore store;
  InvestigationService svc(shared().corpus, "plane", store.path());
  const auto a = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id).id;
  svc.create_investigation("", shared().fx.manifest.investigative_tweet_id);
  svc.refine(a, patch_without_tweet());
  const auto rows = scatter_from_store(store.path());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].story_id, a);
  EXPECT_EQ(rows[0].propagation_h, shared().fx.manifest.propagation_h);
}

TEST(Service, RefinementsOfOneInvestigationAreSerialized) {
  TempStore store;
  InvestigationService svc(shared().corpus, "plane", store.path());
  const auto id = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id).id;
  const auto other = svc.create_investigation("", shared().fx.manifest.investigative_tweet_id).id;
  constexpr int kThreads = 6;
  std::vector<std::uint64_t> generations(kThreads);
  std::atomic<bool> stop{false};
  std::atomic<int> bad_reads{0};
  std::thread reader([&] {
    while (!stop) {
      try {
        const auto body = svc.dataset(id, "summary");
        if (json::parse(body, nullptr, false).is_discarded()) ++bad_reads;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::conflict) ++bad_reads;
      }
    }
  });
  std::vector<std::thread> writers;
  for (int t = 0; t < kThreads; ++t) {
    writers.emplace_back([&, t] {
      auto patch = patch_without_tweet();
      patch["timeline_keywords"] = {"remolcador", "k" + std::to_string(t)};
      generations[static_cast<std::size_t>(t)] = svc.refine(id, patch).generation;
    });
  }
  std::thread parallel([&] { svc.refine(other, patch_without_tweet()); });
  for (auto& w : writers) w.join();
  parallel.join();
  stop = true;
  reader.join();
  std::sort(generations.begin(), generations.end());
  for (int t = 0; t < kThreads; ++t) EXPECT_EQ(generations[static_cast<std::size_t>(t)], std::uint64_t(t + 1));
  EXPECT_EQ(bad_reads.load(), 0);
  EXPECT_EQ(svc.get(id).generation, std::uint64_t(kThreads));
  EXPECT_EQ(svc.get(other).state, InvestigationState::computed);
  // Only the committed generation remains on disk.
  std::size_t gens = 0;
  for (const auto& d : fs::directory_iterator(store.path() / id)) {
    gens += d.path().filename().string().rfind("gen-", 0) == 0 ? 1 : 0;
  }
  EXPECT_EQ(gens, 1u);
}

// HTTP

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<InvestigationService>(shared().corpus, "plane");
    http::register_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Server server_;
  std::unique_ptr<InvestigationService> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpApi, FullRoundTrip) {
  const auto tweet = std::to_string(shared().fx.manifest.investigative_tweet_id);
  auto res = client_->Post("/investigations", json{{"corpus", "plane"}, {"tweet_id", tweet}}.dump(),
                           "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201);
  const auto created = json::parse(res->body);
  const std::string id = created["id"];
  EXPECT_EQ(res->get_header_value("Location"), "/investigations/" + id);
  EXPECT_EQ(created["state"], "draft");

  res = client_->Get("/investigations/" + id + "/datasets/propagation");
  EXPECT_EQ(res->status, 409);

  res = client_->Put("/investigations/" + id + "/config", json{{"patch", {{"optional_threshold", 1}}}}.dump(),
                     "application/json");
  EXPECT_EQ(res->status, 422);
  EXPECT_TRUE(json::parse(res->body).contains("error"));

  res = client_->Put("/investigations/" + id + "/config", json{{"patch", patch_without_tweet()}}.dump(),
                     "application/json");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["state"], "computed");

  for (const auto k : kDatasetKinds) {
    res = client_->Get("/investigations/" + id + "/datasets/" + std::string(k));
    ASSERT_EQ(res->status, 200) << k;
    EXPECT_EQ(res->body, service_->dataset(id, k));
  }
  res = client_->Get("/investigations/" + id + "/datasets/nope");
  EXPECT_EQ(res->status, 400);

  res = client_->Get("/investigations/" + id + "/bins/2014-06-13T10:50:00Z?sort=retweets&order=desc");
  ASSERT_EQ(res->status, 200);
  const auto bin = json::parse(res->body);
  ASSERT_FALSE(bin["tweets"].empty());
  EXPECT_EQ(bin["tweets"][0]["retweet_count"], 580);
  EXPECT_EQ(client_->Get("/investigations/" + id + "/bins/2014-06-13T10:55:00Z")->status, 404);
  EXPECT_EQ(client_->Get("/investigations/" + id + "/bins/2014-06-13T10:50:00Z?sort=x")->status, 400);

  res = client_->Get("/stories?view=condensed");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).size(), 1u);
  EXPECT_EQ(client_->Get("/stories?view=wide")->status, 400);

  res = client_->Get("/keywords/rate?investigation=" + id + "&term=remolcador");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["term"], "remolcador");
  res = client_->Get("/keywords/suggest?investigation=" + id + "&k=3");
  ASSERT_EQ(res->status, 200);
  EXPECT_LE(json::parse(res->body).size(), 3u);
  EXPECT_EQ(client_->Get("/keywords/suggest?investigation=" + id + "&k=0")->status, 400);
  EXPECT_EQ(client_->Get("/keywords/rate?investigation=" + id)->status, 400);
}

TEST_F(HttpApi, ErrorsMapToStatusCodes) {
  auto res = client_->Post("/investigations", json{{"tweet_id", "1"}}.dump(), "application/json");
  EXPECT_EQ(res->status, 404);
  res = client_->Post("/investigations", "not json", "application/json");
  EXPECT_EQ(res->status, 400);
  res = client_->Post("/investigations", json{{"corpus", "plane"}}.dump(), "application/json");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(client_->Get("/investigations/inv-none")->status, 404);
  EXPECT_EQ(client_->Get("/stories")->status, 200);
}
