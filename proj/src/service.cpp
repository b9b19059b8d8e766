#include "flowscope/service.hpp"

#include "flowscope/report.hpp"

#include "httplib.h"

#include <charconv>
#include <cmath>
#include <sstream>

namespace flowscope {

nlohmann::json ApiError::to_json() const
{
  nlohmann::json j{ { "code", code }, { "message", message } };
  if (!detail.is_null()) {
    j["detail"] = detail;
  }
  return j;
}

int http_status(ErrorCode code)
{
  switch (code) {
    case ErrorCode::MalformedRecord:
    case ErrorCode::DuplicateId:
    case ErrorCode::UnknownParent:
    case ErrorCode::CycleDetected:
    case ErrorCode::MultipleRoots:
    case ErrorCode::UnknownLabel:
    case ErrorCode::InvalidDecision:
    case ErrorCode::DuplicateItem:
    case ErrorCode::CrossReferenceError:
    case ErrorCode::NotCategorical:
    case ErrorCode::NotNumeric:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::UnknownCategory:
    case ErrorCode::UnknownFeature:
    case ErrorCode::UnknownRun:
      return 404;
    case ErrorCode::InsufficientData:
    case ErrorCode::NoChildren:
    case ErrorCode::EmptyFlow:
      return 422;
    case ErrorCode::Internal:
      return 500;
  }
  return 500;
}

ApiError api_error(const Error& error)
{
  ApiError out;
  out.status = http_status(error.code());
  out.code = std::string(to_string(error.code()));
  out.message = error.what();
  if (error.line() || !error.details().empty()) {
    out.detail = nlohmann::json::object();
    if (error.line()) {
      out.detail["line"] = *error.line();
    }
    if (!error.details().empty()) {
      out.detail["references"] = error.details();
    }
  }
  return out;
}

SnapshotStore::SnapshotStore(SnapshotPtr snapshot, std::filesystem::path source)
  : snapshot_(std::move(snapshot))
  , source_(std::move(source))
{
  if (!snapshot_) {
    throw Error(ErrorCode::InvalidArgument, "snapshot store needs a snapshot");
  }
}

SnapshotPtr SnapshotStore::current() const
{
  std::lock_guard lock(mutex_);
  return snapshot_;
}

void SnapshotStore::replace(SnapshotPtr snapshot)
{
  if (!snapshot) {
    throw Error(ErrorCode::InvalidArgument, "cannot swap in an empty snapshot");
  }
  std::lock_guard lock(mutex_);
  snapshot_.swap(snapshot);
  // the previous snapshot is released outside the lock, when `snapshot` dies
}

SnapshotPtr SnapshotStore::reload(const std::filesystem::path& dir)
{
  auto loaded = load_snapshot(dir.empty() ? source_ : dir).snapshot;
  replace(loaded);
  return loaded;
}

namespace {

using nlohmann::json;

std::vector<std::string> split_path(const std::string& path)
{
  std::vector<std::string> parts;
  std::string current;
  for (char c : path) {
    if (c == '/') {
      if (!current.empty()) {
        parts.push_back(std::move(current));
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) {
    parts.push_back(std::move(current));
  }
  return parts;
}

class Query
{
public:
  explicit Query(const QueryParams& params)
    : params_(params)
  {}

  std::optional<std::string> get(const std::string& key) const
  {
    auto it = params_.find(key);
    if (it == params_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::string text(const std::string& key) const { return get(key).value_or(""); }

  double number(const std::string& key, double fallback) const
  {
    auto raw = get(key);
    if (!raw) {
      return fallback;
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), v);
    if (ec != std::errc() || end != raw->data() + raw->size() || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "query parameter '" + key + "' is not a number");
    }
    return v;
  }

  long long integer(const std::string& key, long long fallback) const
  {
    auto raw = get(key);
    if (!raw) {
      return fallback;
    }
    long long v = 0;
    auto [end, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), v);
    if (ec != std::errc() || end != raw->data() + raw->size()) {
      throw Error(ErrorCode::InvalidArgument, "query parameter '" + key + "' is not an integer");
    }
    return v;
  }

  std::vector<std::string> list(const std::string& key) const
  {
    std::vector<std::string> out;
    for (auto [it, end] = params_.equal_range(key); it != end; ++it) {
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
          out.push_back(item);
        }
      }
    }
    return out;
  }

private:
  const QueryParams& params_;
};

ApiResponse ok(const json& payload)
{
  return { 200, payload.dump() };
}

ApiResponse failure(int status, std::string code, std::string message)
{
  ApiError e{ status, std::move(code), std::move(message), nullptr };
  return { status, e.to_json().dump() };
}

ApiResponse route_get(const DatasetSnapshot& snap,
                      const std::vector<std::string>& p,
                      const Query& q)
{
  const auto n = p.size();
  if (n == 2 && p[1] == "taxonomy") {
    return ok(report_taxonomy(snap));
  }
  if (n == 4 && p[1] == "nodes") {
    if (p[3] == "quantity") {
      return ok(report_quantity(snap, p[2], q.number("beta", 0.5)));
    }
    if (p[3] == "quality") {
      return ok(report_quality(snap, p[2], q.number("trust", 0.5)));
    }
    if (p[3] == "multilevel") {
      const auto depth = q.integer("depth", 2);
      if (depth < 1 || depth > 64) {
        throw Error(ErrorCode::InvalidArgument, "depth must be between 1 and 64");
      }
      return ok(report_multilevel(snap, p[2], static_cast<int>(depth)));
    }
  }
  if (n == 2 && p[1] == "features") {
    return ok(report_features(snap));
  }
  if (n == 2 && p[1] == "importance") {
    return ok(report_ranking(snap));
  }
  if (n == 4 && p[1] == "features") {
    if (p[3] == "flow") {
      return ok(report_feature_flow(snap, p[2]));
    }
    if (p[3] == "importance") {
      return ok(report_importance(snap, p[2]));
    }
    if (p[3] == "welch") {
      const auto a = q.text("a");
      const auto b = q.text("b");
      if (a.empty() || b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "welch needs query parameters a and b");
      }
      return ok(report_welch(snap, p[2], a, b));
    }
    if (p[3] == "violin") {
      const auto category = q.text("category");
      if (category.empty()) {
        throw Error(ErrorCode::InvalidArgument, "violin needs query parameter category");
      }
      const auto grid = q.integer("grid", 64);
      if (grid < 2 || grid > 4096) {
        throw Error(ErrorCode::InvalidArgument, "grid must be between 2 and 4096");
      }
      return ok(report_violin(snap, p[2], category, static_cast<std::size_t>(grid)));
    }
  }
  if (n == 2 && p[1] == "runs") {
    return ok(report_runs(snap));
  }
  if (n == 4 && p[1] == "runs") {
    if (p[3] == "accuracy") {
      return ok(report_accuracy(snap, p[2]));
    }
    if (p[3] == "misclassification") {
      return ok(report_misclassification(snap, p[2]));
    }
    if (p[3] == "diagnose") {
      const auto min_flow = q.integer("minFlow", 5);
      const auto fanin = q.integer("fanin", 3);
      if (min_flow < 1 || fanin < 1) {
        throw Error(ErrorCode::InvalidArgument, "minFlow and fanin must be positive");
      }
      return ok(report_diagnose(snap, p[2],
                                DiagnoseOptions{ min_flow, static_cast<std::size_t>(fanin) }));
    }
  }
  if (n == 3 && p[1] == "flows" && p[2] == "model-diff") {
    return ok(report_model_diff(snap, q.list("runs"), q.text("category")));
  }
  if (n == 2 && p[1] == "trends") {
    return ok(report_trends(snap, q.list("runs"), q.number("epsilon", 0.005)));
  }
  if (n == 2 && p[1] == "audit") {
    return ok(report_audit(snap, q.number("beta", 0.5), q.number("trust", 0.5)));
  }
  return failure(404, "NotFound", "no such endpoint");
}

json parse_body(const std::string& body)
{
  if (body.empty()) {
    return json::object();
  }
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

} // namespace

ApiResponse handle_request(SnapshotStore& store,
                           const std::string& method,
                           const std::string& path,
                           const QueryParams& query,
                           const std::string& body)
{
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "api") {
    return failure(404, "NotFound", "no such endpoint");
  }
  try {
    const bool is_post_route = parts.size() == 3 && ((parts[1] == "layout" && parts[2] == "sankey") ||
                                                     (parts[1] == "admin" && parts[2] == "reload"));
    if (method != "GET" && method != "POST") {
      return failure(405, "MethodNotAllowed", "only GET and POST are supported");
    }
    if (is_post_route != (method == "POST")) {
      return is_post_route ? failure(405, "MethodNotAllowed", "use POST for this endpoint")
                           : failure(405, "MethodNotAllowed", "use GET for this endpoint");
    }
    if (method == "POST") {
      const auto request = parse_body(body);
      if (parts[1] == "layout") {
        const auto snap = store.current();
        return ok(sankey_request(*snap, request));
      }
      std::filesystem::path dir;
      if (request.is_object() && request.contains("snapshot")) {
        if (!request["snapshot"].is_string()) {
          throw Error(ErrorCode::InvalidArgument, "'snapshot' must be a path string");
        }
        dir = request["snapshot"].get<std::string>();
      }
      const auto loaded = store.reload(dir);
      const auto stats = loaded->stats();
      return ok(json{ { "reloaded", true },
                      { "createdAt", format_instant(loaded->created_at()) },
                      { "instances", stats.instances },
                      { "runs", stats.run_sizes } });
    }
    // the request keeps its own reference; a concurrent reload cannot pull
    // the snapshot out from under it
    const auto snap = store.current();
    return route_get(*snap, parts, Query(query));
  } catch (const Error& e) {
    const auto err = api_error(e);
    return { err.status, err.to_json().dump() };
  } catch (const std::exception& e) {
    return failure(500, std::string(to_string(ErrorCode::Internal)), e.what());
  }
}

std::pair<std::string, int> parse_bind_address(const std::string& address)
{
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port, got '" + address + "'");
  }
  std::string host = address.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  int port = 0;
  const auto* first = address.data() + colon + 1;
  const auto* last = address.data() + address.size();
  auto [end, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || end != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "invalid port in bind address '" + address + "'");
  }
  return { host, port };
}

struct Server::Impl
{
  SnapshotStore& store;
  httplib::Server http;

  explicit Impl(SnapshotStore& s)
    : store(s)
  {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      QueryParams query(req.params.begin(), req.params.end());
      auto out = handle_request(store, req.method, req.path, query, req.body);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    http.Get(R"(/.*)", handler);
    http.Post(R"(/.*)", handler);
    http.Put(R"(/.*)", handler);
    http.Delete(R"(/.*)", handler);
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
      res.status = 500;
      res.set_content(ApiError{ 500, "Internal", "unhandled server error", nullptr }.to_json().dump(),
                      "application/json");
    });
  }
};

Server::Server(SnapshotStore& store)
  : impl_(std::make_unique<Impl>(store))
{}

Server::~Server()
{
  stop();
}

int Server::bind(const std::string& host, int port)
{
  if (port == 0) {
    return impl_->http.bind_to_any_port(host);
  }
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::run()
{
  return impl_->http.listen_after_bind();
}

void Server::stop()
{
  if (impl_) {
    impl_->http.stop();
  }
}

void Server::wait_until_ready() const
{
  impl_->http.wait_until_ready();
}

} // namespace flowscope
