#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "styx/corpus.hpp"
#include "styx/csv.hpp"
#include "styx/error.hpp"
#include "styx/llm/prompt.hpp"
#include "styx/random.hpp"
#include "styx/text.hpp"

namespace styx::llm {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

/// Key of a cached completion: hash of (prompt, model, temperature).
inline std::string cache_key(std::string_view prompt, std::string_view model, double temperature) {
  std::string material;
  material += model;
  material += '\n';
  material += format_double(temperature);
  material += '\n';
  material += prompt;
  return sha256_hex(material);
}

/// Replay fixtures are keyed by the hash of the prompt alone.
inline std::string prompt_hash(std::string_view prompt) { return sha256_hex(prompt); }

inline constexpr const char* kApiKeyVariableName = "STYX_API_KEY";

enum class GenFailure { Auth, RetriesExhausted, FixtureMiss, Protocol };

class GenError : public Error {
 public:
  GenError(GenFailure f, const std::string& msg) : Error(msg, ErrorKind::External), failure_(f) {}
  GenFailure failure() const { return failure_; }

 private:
  GenFailure failure_;
};

struct GenSpec {
  std::size_t n_samples = 1000;
  std::vector<std::string> topics;
  int max_words = 20;
  int max_age = 80;  // upper bound for the Old group's ages
  std::string model = "gpt-4";
  double temperature = 1.0;
  std::uint64_t seed = 42;
  std::size_t concurrency = 4;
};

struct SampledPrompt {
  int age = 0;
  AgeGroup group = AgeGroup::Young;
  std::string topic;
  std::string prompt;
};

/// Group uniform over the three groups, then age uniform inside the group,
/// then topic uniform over the list. Same GenSpec, same prompts.
inline std::vector<SampledPrompt> sample_prompts(const GenSpec& spec) {
  if (spec.n_samples < 1) throw Error("n_samples must be at least 1");
  if (spec.topics.empty()) throw Error("topic list is empty");
  if (spec.max_age < 42) throw Error("max_age must be at least 42");
  Rng rng(spec.seed);
  std::vector<SampledPrompt> out;
  out.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    SampledPrompt s;
    s.group = kAgeGroups[rng.below(3)];
    switch (s.group) {
      case AgeGroup::Young: s.age = static_cast<int>(rng.between(18, 34)); break;
      case AgeGroup::MiddleAged: s.age = static_cast<int>(rng.between(35, 41)); break;
      case AgeGroup::Old: s.age = static_cast<int>(rng.between(42, spec.max_age)); break;
    }
    s.topic = spec.topics[rng.below(spec.topics.size())];
    s.prompt = build_prompt(s.group, s.age, s.topic, spec.max_words);
    out.push_back(std::move(s));
  }
  return out;
}

struct GenRecord {
  std::string text;
  int age = 0;
  AgeGroup age_group = AgeGroup::Young;
  std::string topic;
  std::string prompt;
  std::string model;
  std::string timestamp;  // when the text was retrieved; empty for replayed text

  bool operator==(const GenRecord&) const = default;
};

struct HttpResponse {
  int status = 0;  // 0 = connection-level failure
  std::string body;
};

/// Sends one chat-completions request body and returns the raw response.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpResponse post(const std::string& json_body) = 0;
};

struct Completion {
  std::string text;
  std::string timestamp;
};

/// Where generated text comes from.
class TextSource {
 public:
  virtual ~TextSource() = default;
  virtual Completion fetch(const std::string& prompt) = 0;
};

/// Serves text from a JSON-lines fixture of {prompt_hash, text}; never
/// touches the network.
class ReplaySource : public TextSource {
 public:
  static ReplaySource from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GenError(GenFailure::FixtureMiss, "cannot open replay fixture: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static ReplaySource parse(const std::string& jsonl) {
    ReplaySource src;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        src.texts_[j.at("prompt_hash").get<std::string>()] = j.at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw Error("replay fixture line " + std::to_string(n) + ": " + e.what());
      }
    }
    return src;
  }

  void add(const std::string& prompt, std::string text) { texts_[prompt_hash(prompt)] = std::move(text); }

  Completion fetch(const std::string& prompt) override {
    const auto it = texts_.find(prompt_hash(prompt));
    if (it == texts_.end()) throw GenError(GenFailure::FixtureMiss, "replay fixture has no entry for prompt: " + prompt);
    return {it->second, ""};
  }

 private:
  std::unordered_map<std::string, std::string> texts_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
};

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Live completions through a ChatTransport with an on-disk cache. Cache
/// hits never reach the transport. Connection failures, 429 and 5xx are
/// retried with exponential backoff; 401/403 fail at once.
class LiveSource : public TextSource {
 public:
  LiveSource(ChatTransport& transport, std::string model, double temperature, std::filesystem::path cache_dir,
             RetryPolicy retry = {})
      : transport_(transport),
        model_(std::move(model)),
        temperature_(temperature),
        cache_dir_(std::move(cache_dir)),
        retry_(retry) {}

  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  std::function<std::string()> clock = utc_timestamp;

  Completion fetch(const std::string& prompt) override {
    const std::string key = cache_key(prompt, model_, temperature_);
    if (auto hit = read_cache(key)) return *hit;
    Completion c{request(prompt), clock()};
    write_cache(key, c);
    return c;
  }

  std::size_t network_calls() const { return calls_.load(); }

  std::string request_body(const std::string& prompt) const {
    nlohmann::ordered_json body;
    body["model"] = model_;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = temperature_;
    return body.dump();
  }

 private:
  std::string request(const std::string& prompt) {
    const std::string body = request_body(prompt);
    auto delay = retry_.base_delay;
    std::string last;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
      ++calls_;
      const HttpResponse r = transport_.post(body);
      if (r.status == 200) return parse_content(r.body);
      if (r.status == 401 || r.status == 403)
        throw GenError(GenFailure::Auth, "authentication failed (HTTP " + std::to_string(r.status) + ")");
      const bool transient = r.status == 0 || r.status == 408 || r.status == 429 || r.status >= 500;
      if (!transient)
        throw GenError(GenFailure::Protocol, "chat endpoint returned HTTP " + std::to_string(r.status) + ": " + r.body);
      last = r.status == 0 ? "connection failure" : "HTTP " + std::to_string(r.status);
      if (attempt < retry_.max_attempts) {
        sleep(delay);
        delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * retry_.factor));
      }
    }
    throw GenError(GenFailure::RetriesExhausted,
                   "giving up after " + std::to_string(retry_.max_attempts) + " attempts (last: " + last + ")");
  }

  static std::string parse_content(const std::string& body) {
    try {
      const auto j = nlohmann::json::parse(body);
      return std::string(trim(j.at("choices").at(0).at("message").at("content").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
      throw GenError(GenFailure::Protocol, std::string("malformed chat-completions response: ") + e.what());
    }
  }

  std::optional<Completion> read_cache(const std::string& key) const {
    std::ifstream in(cache_dir_ / key, std::ios::binary);
    if (!in) return std::nullopt;
    try {
      const auto j = nlohmann::json::parse(in);
      return Completion{j.at("text").get<std::string>(), j.value("timestamp", std::string())};
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;  // unreadable entry: refetch and overwrite
    }
  }

  void write_cache(const std::string& key, const Completion& c) const {
    std::filesystem::create_directories(cache_dir_);
    nlohmann::ordered_json j;
    j["text"] = c.text;
    j["timestamp"] = c.timestamp;
    const auto final_path = cache_dir_ / key;
    auto tmp = final_path;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write cache entry: " + tmp.string());
      out << j.dump();
    }
    std::filesystem::rename(tmp, final_path);
  }

  ChatTransport& transport_;
  std::string model_;
  double temperature_;
  std::filesystem::path cache_dir_;
  RetryPolicy retry_;
  std::atomic<std::size_t> calls_{0};
};

/// Samples prompts and fetches their texts with up to spec.concurrency
/// requests in flight. Records are ordered by sample index. The first
/// failure (lowest index) is rethrown after all workers stop.
inline std::vector<GenRecord> generate(const GenSpec& spec, TextSource& source) {
  const auto prompts = sample_prompts(spec);
  std::vector<GenRecord> out(prompts.size());
  std::vector<std::exception_ptr> errors(prompts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  const auto work = [&] {
    for (std::size_t i = next++; i < prompts.size() && !failed; i = next++) {
      try {
        const auto& p = prompts[i];
        Completion c = source.fetch(p.prompt);
        out[i] = GenRecord{std::move(c.text), p.age, p.group, p.topic, p.prompt, spec.model, std::move(c.timestamp)};
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.concurrency, prompts.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Writes records in the blog-corpus column layout, ids "gpt-<index>".
inline void export_gen_corpus(std::ostream& out, std::span<const GenRecord> records) {
  csv::write_row(out, {"id", "gender", "age", "topic", "sign", "date", "text"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv::write_row(out, {"gpt-" + std::to_string(i), "", std::to_string(r.age), r.topic, "", r.timestamp, r.text});
  }
}

}  // namespace styx::llm
