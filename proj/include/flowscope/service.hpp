#pragma once

#include "flowscope/error.hpp"
#include "flowscope/snapshot.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace flowscope {

//! Wire form of every failed request: {"code", "message", "detail"?}.
struct ApiError
{
  int status = 500;
  std::string code;
  std::string message;
  nlohmann::json detail; // null when absent

  nlohmann::json to_json() const;
};

//! 400 input errors, 404 unknown keys, 422 insufficient data, 500 otherwise.
int http_status(ErrorCode code);
ApiError api_error(const Error& error);

//! Holds the current snapshot. Readers take a shared_ptr copy and keep using
//! it for the whole request, so a concurrent swap never exposes a partial
//! snapshot; the old one is released when its last reader finishes.
class SnapshotStore
{
public:
  SnapshotStore(SnapshotPtr snapshot, std::filesystem::path source);

  SnapshotPtr current() const;
  const std::filesystem::path& source() const { return source_; }
  void replace(SnapshotPtr snapshot);
  //! Loads `dir` (default: the original source) fully, then swaps it in.
  //! On failure the current snapshot stays in place.
  SnapshotPtr reload(const std::filesystem::path& dir = {});

private:
  mutable std::mutex mutex_;
  SnapshotPtr snapshot_;
  std::filesystem::path source_;
};

struct ApiResponse
{
  int status = 200;
  std::string body; // JSON
};

using QueryParams = std::multimap<std::string, std::string>;

//! Transport-independent request dispatch. `path` is already percent-decoded.
ApiResponse handle_request(SnapshotStore& store,
                           const std::string& method,
                           const std::string& path,
                           const QueryParams& query,
                           const std::string& body);

//! HTTP front end over handle_request().
class Server
{
public:
  explicit Server(SnapshotStore& store);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  //! Binds host:port; port 0 picks a free one. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  //! Blocks until stop().
  bool run();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

//! "host:port" -> (host, port). Throws InvalidArgument.
std::pair<std::string, int> parse_bind_address(const std::string& address);

} // namespace flowscope
