#pragma once

// Live HTTP transport. Only the CLI includes this header; it needs
// cpp-httplib built with CPPHTTPLIB_OPENSSL_SUPPORT for https endpoints.

#include <memory>
#include <string>

#include <httplib.h>

#include "styx/error.hpp"
#include "styx/llm/generate.hpp"

namespace styx::llm {

inline constexpr std::string_view kDefaultBaseUrl = "https://api.openai.com/v1";


class HttplibTransport : public ChatTransport {
 public:
  HttplibTransport(const std::string& base_url, std::string api_key) : api_key_(std::move(api_key)) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw Error("base URL needs a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? std::string() : base_url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
  }

  HttpResponse post(const std::string& json_body) override {
    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    const auto res = client.Post(path_, headers, json_body, "application/json");
    if (!res) return {0, httplib::to_string(res.error())};
    return {res->status, res->body};
  }

 private:
  std::string origin_;
  std::string path_;
  std::string api_key_;
};

}  // namespace styx::llm
