#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "critnode/variation.hpp"

namespace critnode {

using nlohmann::json;

LlmClient::LlmClient(LlmEndpointConfig config)
    : LlmClient(config, [&] {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
          throw LlmError("environment variable " + config.api_key_env + " is not set");
        return std::string(key);
      }()) {}

LlmClient::LlmClient(LlmEndpointConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) throw LlmError("bad base_url: " + config_.base_url);
  origin_ = m[1];
  path_prefix_ = m[2];
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (config_.temperature_crossover < 0 || config_.temperature_mutation < 0)
    throw LlmError("temperatures must be non-negative");
}

std::string LlmClient::complete(const std::string& prompt, double temperature) {
  const json request = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
  };
  const std::string body = request.dump();

  httplib::Client cli(origin_);
  const auto secs = std::chrono::duration<double>(config_.timeout_seconds);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(secs);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double wait = config_.backoff_seconds * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    log_transcript(body, res->body);
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw LlmError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    try {
      const json reply = json::parse(res->body);
      const auto& content = reply.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const json::exception& e) {
      throw LlmError(std::string("malformed completion response: ") + e.what());
    }
  }
  throw LlmError("giving up after " + std::to_string(config_.max_retries + 1) +
                 " attempts: " + last_error);
}

void LlmClient::log_transcript(const std::string& request, const std::string& response) {
  if (config_.transcripts_dir.empty()) return;
  const std::uint64_t n = ++calls_;
  std::filesystem::create_directories(config_.transcripts_dir);
  char name[32];
  std::snprintf(name, sizeof name, "call-%06llu.json", static_cast<unsigned long long>(n));
  json record = {{"request", json::parse(request)}, {"response", response}};
  std::ofstream(config_.transcripts_dir / name) << record.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

LlmOperator::LlmOperator(std::shared_ptr<LlmClient> client, PromptTemplates templates)
    : client_(std::move(client)),
      templates_(std::move(templates)),
      fallback_(client_->config().max_offspring) {}

std::string LlmOperator::crossover_prompt(std::span<const Parent> parents) const {
  std::string listing;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof score, "%.5f", parents[i].fitness);
    listing += "Function " + std::to_string(i + 1) + " (score " + score + "):\n```\n" +
               dsl::print_canonical(parents[i].expr) + "\n```\n";
  }
  if (!listing.empty()) listing.pop_back();
  return render(templates_.crossover,
                {{"parents", listing}, {"count", std::to_string(client_->config().max_offspring)}});
}

std::string LlmOperator::mutation_prompt(const dsl::Expr& e) const {
  return render(templates_.mutation, {{"function", dsl::print_canonical(e)}});
}

VariationReport LlmOperator::crossover(std::span<const Parent> parents, std::uint64_t seed) {
  if (parents.size() < 2) throw std::invalid_argument("crossover needs at least two parents");
  const auto& cfg = client_->config();
  std::string text;
  try {
    text = client_->complete(crossover_prompt(parents), cfg.temperature_crossover);
  } catch (const LlmError&) {
    if (!cfg.mock_fallback) throw;
    VariationReport r = fallback_.crossover(parents, seed);
    r.fallbacks = 1;
    return r;
  }

  VariationReport report;
  report.requested = cfg.max_offspring;
  const auto blocks = extract_code_blocks(text);
  if (blocks.empty()) report.discarded.push_back({text, "no_code_block", "no fenced code block"});
  for (const auto& block : blocks) {
    auto v = validate_offspring(block);
    if (auto* rej = std::get_if<Rejection>(&v)) {
      report.discarded.push_back(std::move(*rej));
    } else if (report.accepted.size() < cfg.max_offspring) {
      report.accept(std::get<dsl::Expr>(std::move(v)));
    }
  }
  return report;
}

VariationReport LlmOperator::mutate(const dsl::Expr& e, std::uint64_t seed) {
  const auto& cfg = client_->config();
  std::string text;
  try {
    text = client_->complete(mutation_prompt(e), cfg.temperature_mutation);
  } catch (const LlmError&) {
    if (!cfg.mock_fallback) throw;
    VariationReport r = fallback_.mutate(e, seed);
    r.fallbacks = 1;
    return r;
  }

  VariationReport report;
  report.requested = 1;
  const auto blocks = extract_code_blocks(text);
  if (blocks.empty()) report.discarded.push_back({text, "no_code_block", "no fenced code block"});
  for (const auto& block : blocks) {
    auto v = validate_offspring(block);
    if (auto* rej = std::get_if<Rejection>(&v)) {
      report.discarded.push_back(std::move(*rej));
      continue;
    }
    report.accept(std::get<dsl::Expr>(std::move(v)));
    break;
  }
  return report;
}

}  // namespace critnode
