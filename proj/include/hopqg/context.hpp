#pragma once

// Annotated input text: sentences, OpenIE triples, coreference clusters and
// optional named-entity spans. All offsets are byte offsets into `context`.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopqg/error.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

struct Span {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool contains(const Span& o) const {
    return sentence == o.sentence && start <= o.start && o.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Sentence {
  std::size_t index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;
};

struct Triple {
  Span subject;
  Span relation;
  Span object;
};

struct CorefCluster {
  std::vector<Span> mentions;
  std::size_t canonical = 0;
};

struct NamedEntity {
  Span span;
  std::string type;  // PERSON, LOC, ... or empty when unknown
};

struct AnnotatedContext {
  std::string id;
  std::string context;
  std::vector<Sentence> sentences;
  std::vector<Triple> triples;
  std::vector<CorefCluster> coref_clusters;
  // Absent means "no NE annotation available": the graph builder falls back
  // to a capitalization heuristic.
  std::optional<std::vector<NamedEntity>> named_entities;

  std::string_view slice(const Span& s) const {
    return std::string_view(context).substr(s.start, s.end - s.start);
  }
};

namespace detail {

inline void check_span(const AnnotatedContext& ctx, const Span& s, std::string_view what,
                       std::size_t index) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidInput,
                std::string(what) + " " + std::to_string(index) + ": " + why, index);
  };
  if (s.sentence >= ctx.sentences.size()) fail("sentence index out of range");
  if (s.start >= s.end) fail("empty or inverted span");
  const Sentence& sent = ctx.sentences[s.sentence];
  if (s.start < sent.char_start || s.end > sent.char_end) fail("span out of bounds of its sentence");
}

}  // namespace detail

// Index of the representative mention: longest non-pronominal one, earliest on
// ties; falls back to the longest mention when all are pronouns.
inline std::size_t canonical_mention(const AnnotatedContext& ctx, const std::vector<Span>& mentions) {
  std::size_t best = 0;
  bool best_pron = true;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    bool pron = text::is_pronoun(ctx.slice(mentions[i]));
    const Span& b = mentions[best];
    bool better = false;
    if (i == 0) {
      better = true;
    } else if (best_pron != pron) {
      better = !pron;
    } else if (mentions[i].size() != b.size()) {
      better = mentions[i].size() > b.size();
    } else {
      better = mentions[i] < b;
    }
    if (better) {
      best = i;
      best_pron = pron;
    }
  }
  return best;
}

// Throws InvalidInput naming the offending element.
inline void validate(const AnnotatedContext& ctx) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < ctx.sentences.size(); ++i) {
    const Sentence& s = ctx.sentences[i];
    if (s.index != i || s.char_start > s.char_end || s.char_end > ctx.context.size() ||
        s.char_start < prev_end) {
      throw Error(ErrorCode::InvalidInput,
                  "sentence " + std::to_string(i) + ": offsets out of order or out of bounds", i);
    }
    prev_end = s.char_end;
  }
  for (std::size_t i = 0; i < ctx.triples.size(); ++i) {
    const Triple& t = ctx.triples[i];
    detail::check_span(ctx, t.subject, "triple", i);
    detail::check_span(ctx, t.relation, "triple", i);
    detail::check_span(ctx, t.object, "triple", i);
    if (t.subject.sentence != t.relation.sentence || t.subject.sentence != t.object.sentence) {
      throw Error(ErrorCode::InvalidInput,
                  "triple " + std::to_string(i) + ": spans lie in different sentences", i);
    }
  }
  for (std::size_t i = 0; i < ctx.coref_clusters.size(); ++i) {
    const auto& c = ctx.coref_clusters[i];
    if (c.mentions.size() < 2 || c.canonical >= c.mentions.size()) {
      throw Error(ErrorCode::InvalidInput,
                  "coref cluster " + std::to_string(i) + ": needs at least two mentions", i);
    }
    for (const auto& m : c.mentions) detail::check_span(ctx, m, "coref cluster", i);
  }
  if (ctx.named_entities) {
    for (std::size_t i = 0; i < ctx.named_entities->size(); ++i)
      detail::check_span(ctx, (*ctx.named_entities)[i].span, "named entity", i);
  }
}

inline Span span_from_json(const nlohmann::json& j) {
  return Span{j.at("sent").get<std::size_t>(), j.at("start").get<std::size_t>(),
              j.at("end").get<std::size_t>()};
}

inline nlohmann::json span_to_json(const Span& s) {
  return {{"sent", s.sentence}, {"start", s.start}, {"end", s.end}};
}

// Parses and validates. Schema errors (missing keys, wrong types) are reported
// as InvalidInput as well.
inline AnnotatedContext context_from_json(const nlohmann::json& j) {
  AnnotatedContext ctx;
  try {
    if (j.contains("id")) {
      ctx.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    }
    ctx.context = j.at("context").get<std::string>();
    const auto& sents = j.at("sentences");
    for (std::size_t i = 0; i < sents.size(); ++i) {
      Sentence s;
      s.index = i;
      s.char_start = sents[i].at("start").get<std::size_t>();
      s.char_end = sents[i].at("end").get<std::size_t>();
      if (s.char_start <= s.char_end && s.char_end <= ctx.context.size())
        s.text = ctx.context.substr(s.char_start, s.char_end - s.char_start);
      ctx.sentences.push_back(std::move(s));
    }
    if (j.contains("triples")) {
      for (const auto& t : j.at("triples")) {
        ctx.triples.push_back(Triple{span_from_json(t.at("subject")),
                                     span_from_json(t.at("relation")),
                                     span_from_json(t.at("object"))});
      }
    }
    if (j.contains("coref_clusters")) {
      for (const auto& c : j.at("coref_clusters")) {
        CorefCluster cluster;
        for (const auto& m : c) cluster.mentions.push_back(span_from_json(m));
        ctx.coref_clusters.push_back(std::move(cluster));
      }
    }
    if (j.contains("named_entities") && !j.at("named_entities").is_null()) {
      std::vector<NamedEntity> nes;
      for (const auto& n : j.at("named_entities")) {
        NamedEntity ne{span_from_json(n), n.value("type", std::string{})};
        nes.push_back(std::move(ne));
      }
      ctx.named_entities = std::move(nes);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("annotated context schema: ") + e.what());
  }
  validate(ctx);
  for (auto& c : ctx.coref_clusters) c.canonical = canonical_mention(ctx, c.mentions);
  return ctx;
}

inline nlohmann::json context_to_json(const AnnotatedContext& ctx) {
  nlohmann::json j;
  if (!ctx.id.empty()) j["id"] = ctx.id;
  j["context"] = ctx.context;
  j["sentences"] = nlohmann::json::array();
  for (const auto& s : ctx.sentences)
    j["sentences"].push_back({{"start", s.char_start}, {"end", s.char_end}});
  j["triples"] = nlohmann::json::array();
  for (const auto& t : ctx.triples) {
    j["triples"].push_back({{"subject", span_to_json(t.subject)},
                            {"relation", span_to_json(t.relation)},
                            {"object", span_to_json(t.object)}});
  }
  j["coref_clusters"] = nlohmann::json::array();
  for (const auto& c : ctx.coref_clusters) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : c.mentions) arr.push_back(span_to_json(m));
    j["coref_clusters"].push_back(std::move(arr));
  }
  if (ctx.named_entities) {
    j["named_entities"] = nlohmann::json::array();
    for (const auto& ne : *ctx.named_entities) {
      auto nj = span_to_json(ne.span);
      if (!ne.type.empty()) nj["type"] = ne.type;
      j["named_entities"].push_back(std::move(nj));
    }
  }
  return j;
}

}  // namespace hopqg
