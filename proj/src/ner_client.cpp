#include "afroasr/ner_client.hpp"

#include <httplib.h>

#include <future>
#include <thread>
#include <unordered_map>

#include "afroasr/detail/span_json.hpp"
#include "afroasr/error.hpp"

namespace afroasr::entities {

using json = nlohmann::json;

Endpoint parse_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw DataError("endpoint '" + std::string(url) + "' has no scheme");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw DataError("endpoint scheme must be http or https: '" + std::string(url) + "'");
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint ep;
  ep.scheme_host_port = std::string(url.substr(0, path_start));
  if (ep.scheme_host_port.size() == host_start) throw DataError("endpoint '" + std::string(url) + "' has no host");
  ep.path = path_start == std::string_view::npos ? "" : std::string(url.substr(path_start));
  if (ep.path.empty() || ep.path == "/") ep.path = "/ner";
  return ep;
}

namespace {

struct Item {
  std::string id;
  std::string text;
  std::size_t token_count;
};

std::vector<std::pair<std::string, std::vector<EntitySpan>>> parse_response(
    const std::string& body, std::span<const Item> batch) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw RemoteError(std::string("NER response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("results"))
    throw RemoteError("NER response schema mismatch: missing field 'results'");
  const auto& results = doc["results"];
  if (!results.is_array()) throw RemoteError("NER response schema mismatch: 'results' must be an array");

  std::unordered_map<std::string, const Item*> expected;
  for (const auto& item : batch) expected.emplace(item.id, &item);

  std::vector<std::pair<std::string, std::vector<EntitySpan>>> out;
  for (const auto& r : results) {
    if (!r.is_object() || !r.contains("id") || !r["id"].is_string())
      throw RemoteError("NER response schema mismatch: result missing field 'id'");
    const auto id = r["id"].get<std::string>();
    auto it = expected.find(id);
    if (it == expected.end()) throw RemoteError("NER response contains unrequested or repeated id '" + id + "'");
    if (!r.contains("spans") || !r["spans"].is_array())
      throw RemoteError("NER response schema mismatch: result '" + id + "' missing field 'spans'");
    std::vector<EntitySpan> spans;
    for (const auto& s : r["spans"]) {
      try {
        spans.push_back(detail::span_from_json(s, SpanSource::kNer));
      } catch (const DataError& e) {
        throw RemoteError("NER response schema mismatch for '" + id + "': " + e.what());
      }
    }
    try {
      check_span_range(spans, it->second->token_count, id);
    } catch (const DataError& e) {
      throw RemoteError(std::string("NER response: ") + e.what());
    }
    out.emplace_back(id, std::move(spans));
    expected.erase(it);
  }
  if (!expected.empty())
    throw RemoteError("NER response is missing result for '" + expected.begin()->first + "'");
  return out;
}

std::vector<std::pair<std::string, std::vector<EntitySpan>>> fetch_batch(
    const Endpoint& ep, std::span<const Item> batch, const NerClientOptions& opts) {
  json request;
  request["texts"] = json::array();
  for (const auto& item : batch) request["texts"].push_back({{"id", item.id}, {"text", item.text}});
  const std::string body = request.dump();

  httplib::Client client(ep.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto backoff = opts.initial_backoff;
  std::string last_error;
  const int attempts = std::max(opts.max_attempts, 1);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      return parse_response(res->body, batch);
    } else if (res->status >= 400 && res->status < 500) {
      throw RemoteError("NER service returned HTTP " + std::to_string(res->status));
    } else {
      last_error = "HTTP " + std::to_string(res->status);
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw RemoteError("NER request failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace

SpanMap fetch_ner(std::string_view endpoint, const corpus::Corpus& utterances,
                  const NerClientOptions& opts) {
  const Endpoint ep = parse_endpoint(endpoint);
  if (opts.batch_size == 0) throw DataError("NER batch size must be positive");

  std::vector<Item> items;
  items.reserve(utterances.size());
  for (const auto& u : utterances.utterances()) {
    auto text = textnorm::normalize(u.reference);
    const auto count = textnorm::tokenize(text).size();
    items.push_back({u.id, std::move(text), count});
  }

  std::vector<std::span<const Item>> batches;
  for (std::size_t i = 0; i < items.size(); i += opts.batch_size)
    batches.emplace_back(items.data() + i, std::min(opts.batch_size, items.size() - i));

  SpanMap out;
  const std::size_t window = std::max<std::size_t>(opts.max_concurrent_batches, 1);
  for (std::size_t first = 0; first < batches.size(); first += window) {
    std::vector<std::future<std::vector<std::pair<std::string, std::vector<EntitySpan>>>>> inflight;
    for (std::size_t b = first; b < std::min(first + window, batches.size()); ++b)
      inflight.push_back(std::async(std::launch::async, fetch_batch, std::cref(ep), batches[b], std::cref(opts)));
    for (auto& f : inflight)
      for (auto& [id, spans] : f.get()) out.emplace(std::move(id), std::move(spans));
  }
  return out;
}

}  // namespace afroasr::entities
