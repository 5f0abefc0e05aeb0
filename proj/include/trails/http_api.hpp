#pragma once

// HTTP routes over InvestigationService.
//
//   POST /investigations                        {corpus, tweet_id} -> 201
//   GET  /investigations/{id}
//   PUT  /investigations/{id}/config            {patch} -> 200 | 422
//   GET  /investigations/{id}/datasets/{kind}   -> 200 | 409 while draft
//   GET  /investigations/{id}/bins/{start}?sort=retweets|time|original_first&order=asc|desc
//   GET  /stories?view=condensed|full
//   GET  /keywords/rate?investigation={id}&term=...
//   GET  /keywords/suggest?investigation={id}&k=...

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "trails/service.hpp"

namespace trails::http {

inline int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    case ErrorKind::validation: return 422;
    case ErrorKind::invalid_argument: return 400;
    case ErrorKind::empty_story: return 409;
    case ErrorKind::io: return 500;
  }
  return 500;
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(dump_document(body), "application/json; charset=utf-8");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

// Runs a handler body, translating exceptions into error documents.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, status_for(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, std::string("malformed request body: ") + e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

inline nlohmann::json parse_body(const httplib::Request& req) {
  auto body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorKind::invalid_argument, "request body is not valid JSON");
  return body;
}

inline std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) {
    throw Error(ErrorKind::invalid_argument, std::string("missing query parameter '") + name + "'");
  }
  return req.get_param_value(name);
}

}  // namespace detail

/// Registers every route on `server`. The service must outlive the server.
inline void register_routes(httplib::Server& server, InvestigationService& service) {
  using detail::guarded;
  using detail::send_json;
  using nlohmann::json;

  server.Post("/investigations", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = detail::parse_body(req);
      if (!body.is_object() || !body.contains("tweet_id")) {
        throw Error(ErrorKind::invalid_argument, "body needs 'tweet_id'");
      }
      const auto tweet = doc::parse_id_field(body["tweet_id"], "tweet_id");
      const auto corpus = body.value("corpus", std::string());
      const auto inv = service.create_investigation(corpus, tweet);
      auto out = service.investigation_document(inv.id);
      res.set_header("Location", "/investigations/" + inv.id);
      send_json(res, 201, out);
    });
  });

  server.Get(R"(/investigations/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service.investigation_document(req.matches[1])); });
  });

  server.Put(R"(/investigations/([^/]+)/config)",
             [&](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 auto body = detail::parse_body(req);
                 // Accept {"patch": {...}} or the bare patch object.
                 const json patch =
                     body.is_object() && body.size() == 1 && body.contains("patch") ? body["patch"] : body;
                 const std::string id = req.matches[1];
                 service.refine(id, patch);
                 send_json(res, 200, service.investigation_document(id));
               });
             });

  server.Get(R"(/investigations/([^/]+)/datasets/([^/]+))",
             [&](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.status = 200;
                 res.set_content(service.dataset(req.matches[1], req.matches[2].str()),
                                 "application/json; charset=utf-8");
               });
             });

  server.Get(R"(/investigations/([^/]+)/bins/([^/]+))",
             [&](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const auto start = parse_iso8601(req.matches[2].str());
                 if (!start) throw Error(ErrorKind::invalid_argument, "bin start must be ISO-8601");
                 const auto sort = req.has_param("sort") ? req.get_param_value("sort") : "time";
                 const auto order = req.has_param("order") ? req.get_param_value("order") : "asc";
                 BinSortKey key = BinSortKey::time;
                 if (sort == "retweets") {
                   key = BinSortKey::retweets;
                 } else if (sort == "original_first") {
                   key = BinSortKey::original_first;
                 } else if (sort != "time") {
                   throw Error(ErrorKind::invalid_argument, "sort must be retweets, time or original_first");
                 }
                 if (order != "asc" && order != "desc") {
                   throw Error(ErrorKind::invalid_argument, "order must be asc or desc");
                 }
                 json tweets = json::array();
                 for (const auto& t : service.bin_tweets(req.matches[1], *start, key,
                                                         order == "asc" ? SortOrder::asc : SortOrder::desc)) {
                   tweets.push_back(doc::to_json(t));
                 }
                 send_json(res, 200, {{"interval_start", format_iso8601(*start)}, {"tweets", tweets}});
               });
             });

  server.Get("/stories", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto view = req.has_param("view") ? req.get_param_value("view") : "condensed";
      if (view != "condensed" && view != "full") {
        throw Error(ErrorKind::invalid_argument, "view must be condensed or full");
      }
      send_json(res, 200, service.list_stories(view == "full" ? StoryView::full : StoryView::condensed));
    });
  });

  server.Get("/keywords/rate", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto id = detail::required_param(req, "investigation");
      const auto term = detail::required_param(req, "term");
      send_json(res, 200, doc::to_json(service.rate(id, term)));
    });
  });

  server.Get("/keywords/suggest", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto id = detail::required_param(req, "investigation");
      std::size_t k = 10;
      if (req.has_param("k")) {
        const auto raw = req.get_param_value("k");
        try {
          const long v = std::stol(raw);
          if (v <= 0) throw std::invalid_argument("k");
          k = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
          throw Error(ErrorKind::invalid_argument, "k must be a positive integer");
        }
      }
      send_json(res, 200, doc::to_json(service.suggest(id, k)));
    });
  });
}

}  // namespace trails::http
