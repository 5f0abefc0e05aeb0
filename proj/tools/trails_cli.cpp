// trails: investigate a rumor from the command line, serve the HTTP API, or
// export the gallery scatter.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "trails/http_api.hpp"
#include "trails/pipeline.hpp"
#include "trails/service.hpp"

namespace fs = std::filesystem;

namespace {

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

int investigate(const std::string& corpus_path, const std::string& tweet, const std::string& config_path,
                const std::string& out_dir, bool summary_only) {
  const auto corpus = trails::Corpus::load_file(corpus_path);
  for (const auto& r : corpus.rejections()) {
    std::cerr << corpus_path << ":" << r.line << ": skipped (" << r.reason << ")\n";
  }
  auto j = nlohmann::json::parse(trails::read_file(config_path));
  if (!j.is_object()) throw trails::Error(trails::ErrorKind::validation, "config must be an object");
  std::optional<trails::Category> category;
  if (const auto it = j.find("category"); it != j.end()) {
    if (!it->is_null()) {
      category = it->is_string() ? trails::parse_category(it->get<std::string>()) : std::nullopt;
      if (!category) throw trails::Error(trails::ErrorKind::validation, "unknown category");
    }
    j.erase(it);
  }
  j["investigative_tweet_id"] = tweet;
  const auto config = trails::doc::config_from_json(j);
  trails::validate(config);
  if (!corpus.find(config.investigative_tweet_id)) {
    throw trails::Error(trails::ErrorKind::not_found, "tweet " + tweet + " not in corpus");
  }

  const auto artifacts = trails::run_pipeline(corpus, config, {}, category);
  std::cout << artifacts.summary.headline_text;
  if (summary_only || out_dir.empty()) return 0;

  fs::create_directories(out_dir);
  trails::write_file_atomic(fs::path(out_dir) / "config.json",
                            trails::dump_document(trails::doc::to_json(config)));
  for (const auto& [kind, text] : trails::InvestigationService::render(artifacts)) {
    trails::write_file_atomic(fs::path(out_dir) / (kind + ".json"), text);
  }
  return 0;
}

int serve(const std::string& corpus_path, const std::string& store, const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    throw trails::Error(trails::ErrorKind::invalid_argument, "--listen expects host:port");
  }
  const auto host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));

  auto corpus = std::make_shared<const trails::Corpus>(trails::Corpus::load_file(corpus_path));
  trails::InvestigationService service(corpus, fs::path(corpus_path).filename().string(), store);
  httplib::Server server;
  trails::http::register_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::cerr << "listening on " << host << ":" << port << " (corpus " << corpus->size() << " tweets)\n";
  if (!server.listen(host, port)) {
    throw trails::Error(trails::ErrorKind::io, "cannot listen on " + listen);
  }
  return 0;
}

int scatter(const std::string& store, const std::string& out) {
  const auto rows = trails::scatter_from_store(store);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw trails::Error(trails::ErrorKind::io, "cannot write '" + out + "'");
  trails::write_scatter_csv(file, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rumor investigation over a tweet corpus"};
  app.require_subcommand(1);

  std::string corpus, tweet, config, out, store, listen = "127.0.0.1:8080";
  bool summary_only = false;

  auto* inv = app.add_subcommand("investigate", "Run one investigation and print its summary");
  inv->add_option("--corpus", corpus, "NDJSON corpus")->required();
  inv->add_option("--tweet", tweet, "Investigative tweet id")->required();
  inv->add_option("--config", config, "Investigation config (JSON)")->required();
  inv->add_option("--out", out, "Directory for artifact documents");
  inv->add_flag("--summary-only", summary_only, "Print the summary, write nothing");

  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  srv->add_option("--corpus", corpus, "NDJSON corpus")->required();
  srv->add_option("--store", store, "Investigation store directory")->required();
  srv->add_option("--listen", listen, "host:port")->capture_default_str();

  auto* sc = app.add_subcommand("scatter", "Export propagation/skepticism rows as CSV");
  sc->add_option("--store", store, "Investigation store directory")->required();
  sc->add_option("--out", out, "CSV output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (inv->parsed()) return investigate(corpus, tweet, config, out, summary_only);
    if (srv->parsed()) return serve(corpus, store, listen);
    return scatter(store, out);
  } catch (const trails::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == trails::ErrorKind::io ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
