#include <doctest.h>

#include <random>

#include "affect/text.hpp"
#include "support.hpp"

using namespace affect;
using namespace affect::text;

namespace {

const TextResources& shipped() {
  static const TextResources r = [] {
    TextResources r;
    r.lexicon = Lexicon::load_tsv(testing::data_dir() / "lexicon.tsv");
    r.lemmas = LemmaDictionary::load_tsv(testing::data_dir() / "lemmas.tsv");
    return r;
  }();
  return r;
}

const Token* find_token(const TextAnalysis& a, std::string_view surface) {
  for (const auto& t : a.tokens) {
    if (t.surface == surface) return &t;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("case folding covers Spanish letters") {
  CHECK(to_lower("ÁRBOL Ñandú ÉXITO") == "árbol ñandú éxito");
  CHECK(fold_diacritics("Pánico DAÑO pingüino") == "panico dano pinguino");
}

TEST_CASE("shipped lexicon has ten lemmas per emotion") {
  const auto& lex = shipped().lexicon;
  CHECK(lex.size() == 60);
  std::map<Emotion, int> per;
  for (const auto& e : lex.entries()) ++per[e.emotion];
  for (auto e : kEmotions) CHECK(per[e] == 10);
  REQUIRE(lex.find("feliz") != nullptr);
  CHECK(lex.find("feliz")->weight == 0.8);
  CHECK(lex.find("feliz")->valence == 0.8);
}

TEST_CASE("lexicon parsing rejects malformed rows") {
  CHECK_THROWS_AS(Lexicon::parse_tsv("feliz\tjoy\t0\t0.5\n"), ResourceError);
  CHECK_THROWS_AS(Lexicon::parse_tsv("feliz\tjoy\t1.5\t0.5\n"), ResourceError);
  CHECK_THROWS_AS(Lexicon::parse_tsv("feliz\tjoy\t0.5\t-2\n"), ResourceError);
  CHECK_THROWS_AS(Lexicon::parse_tsv("feliz\tsurprise\t0.5\t0.5\n"), ResourceError);
  const auto lex = Lexicon::parse_tsv("# c\nlemma\temotion\tweight\tvalence\nAlegre\talegría\t0.5\t0.5\n");
  REQUIRE(lex.size() == 1);
  CHECK(lex.find("alegre")->emotion == Emotion::joy);
}

TEST_CASE("intensifier multiplies the next content token") {
  const auto a = preprocess("muy feliz", shipped());
  REQUIRE(a.tokens.size() == 1);
  CHECK(a.tokens[0].lemma == "feliz");
  CHECK(a.tokens[0].multiplier == 1.5);
  REQUIRE(a.intensifiers_applied.size() == 1);
  CHECK(a.intensifiers_applied[0].phrase == "muy");
}

TEST_CASE("bigram intensifier wins over its suffix") {
  const auto a = preprocess("un poco triste", shipped());
  REQUIRE(a.tokens.size() == 1);
  CHECK(a.tokens[0].multiplier == 0.7);
}

TEST_CASE("longest match never applies the bare suffix multiplier") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> filler{"hoy", "estoy", "la", "verdad", "pues", "triste", "feliz"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int i = 0; i < 4; ++i) text += filler[rng() % filler.size()] + " ";
    text += "un poco enojado";
    const auto a = preprocess(text, shipped());
    const Token* t = nullptr;
    for (const auto& tok : a.tokens) {
      if (tok.surface == "enojado") t = &tok;
    }
    REQUIRE(t != nullptr);
    CHECK(t->multiplier == doctest::Approx(0.7));
  }
}

TEST_CASE("stacked intensifiers compound") {
  const auto a = preprocess("muy muy feliz", shipped());
  REQUIRE(a.tokens.size() == 1);
  CHECK(a.tokens[0].multiplier == doctest::Approx(2.25));
}

TEST_CASE("empty text is empty analysis") {
  const auto a = preprocess("", shipped());
  CHECK(a.tokens.empty());
  CHECK(a.negations_detected == 0);
  const auto r = text_emotion("", shipped());
  CHECK(r.distribution == EmotionDistribution{});
  CHECK(r.vad.valence == 0.0);
  CHECK(r.confidence == 0.0);
}

TEST_CASE("negation scope covers three content tokens and stops at punctuation") {
  const auto a = preprocess("no estoy muy feliz hoy contento", shipped());
  CHECK(a.negations_detected == 1);
  CHECK(find_token(a, "estoy")->negated);
  CHECK(find_token(a, "feliz")->negated);
  CHECK(find_token(a, "hoy")->negated);
  CHECK_FALSE(find_token(a, "contento")->negated);

  const auto b = preprocess("no estoy, feliz", shipped());
  CHECK(find_token(b, "estoy")->negated);
  CHECK_FALSE(find_token(b, "feliz")->negated);

  for (const char* brk : {".", ";", ":", "!", "?"}) {
    const auto c = preprocess(std::string("nunca ") + brk + " feliz", shipped());
    CHECK_FALSE(find_token(c, "feliz")->negated);
  }
}

TEST_CASE("double negation within scope cancels") {
  const auto plain = score_text(preprocess("feliz", shipped()), shipped().lexicon);
  const auto twice = score_text(preprocess("no no feliz", shipped()), shipped().lexicon);
  CHECK(twice.scores == plain.scores);
  CHECK(twice.valence == plain.valence);
}

TEST_CASE("scores follow weight times multiplier") {
  const auto s = score_text(preprocess("muy feliz", shipped()), shipped().lexicon);
  CHECK(s.scores[index_of(Emotion::joy)] == doctest::Approx(1.2));
  CHECK(s.valence == 1.0);
  CHECK(s.matched == 1);
}

TEST_CASE("negated joy becomes half-weight sadness") {
  const auto s = score_text(preprocess("no estoy feliz", shipped()), shipped().lexicon);
  CHECK(s.scores[index_of(Emotion::sadness)] == doctest::Approx(0.4));
  CHECK(s.scores[index_of(Emotion::joy)] == 0.0);
  CHECK(s.valence == doctest::Approx(-0.4));
  CHECK(dominant_emotion(text_emotion("no estoy feliz", shipped()).distribution).label == Emotion::sadness);
}

TEST_CASE("negation involution") {
  CHECK(negate(Emotion::joy) == Emotion::sadness);
  CHECK(negate(Emotion::sadness) == Emotion::joy);
  CHECK(negate(Emotion::anger) == Emotion::neutral);
  CHECK(negate(Emotion::fear) == Emotion::neutral);
  CHECK(negate(Emotion::disgust) == Emotion::neutral);
  CHECK(negate(Emotion::neutral) == Emotion::neutral);
  const auto s = score_text(preprocess("no estoy enojado", shipped()), shipped().lexicon);
  CHECK(s.scores[index_of(Emotion::neutral)] == doctest::Approx(0.4));
  CHECK(s.valence == doctest::Approx(0.35));
}

TEST_CASE("no lexicon matches means no evidence") {
  const auto s = score_text(preprocess("el perro come pan", shipped()), shipped().lexicon);
  CHECK(s.scores == EmotionScores{});
  CHECK(s.valence == 0.0);
  CHECK(s.matched == 0);
}

TEST_CASE("text_emotion output contract") {
  const auto r = text_emotion("Muy FELIZ!", shipped());
  CHECK(dominant_emotion(r.distribution).label == Emotion::joy);
  CHECK(r.confidence == doctest::Approx(0.2));
  CHECK(r.vad.valence == 1.0);
  CHECK(r.vad.arousal == doctest::Approx(0.6));
  CHECK(r.vad.dominance == 0.5);
  CHECK(std::get<std::string>(r.metadata.at("matched_lemmas")) == "feliz");
  CHECK(std::get<std::int64_t>(r.metadata.at("matched_tokens")) == 1);
}

TEST_CASE("lemma dictionary maps inflected forms") {
  const auto r = text_emotion("estamos contentas", shipped());
  CHECK(dominant_emotion(r.distribution).label == Emotion::joy);
  CHECK(shipped().lemmas.lemma_of("desconocido") == "desconocido");
}

TEST_CASE("metadata lists only lexicon hits") {
  const auto r = text_emotion("soy Ana García y no estoy triste", shipped());
  CHECK(std::get<std::string>(r.metadata.at("matched_lemmas")) == "~triste");
}

TEST_CASE("intensifiers never change a single token's dominant emotion") {
  const auto& lex = shipped().lexicon;
  for (const auto& entry : lex.entries()) {
    if (entry.lemma.find(' ') != std::string::npos) continue;
    const auto base = dominant_emotion(text_emotion(entry.lemma, shipped()).distribution).label;
    for (const char* i : {"muy", "extremadamente", "sumamente", "totalmente", "algo", "un poco", "poco"}) {
      CHECK(dominant_emotion(text_emotion(std::string(i) + " " + entry.lemma, shipped()).distribution).label == base);
    }
  }
}

TEST_CASE("random text always yields a valid result") {
  std::mt19937_64 rng(31);
  std::vector<std::string> vocab{"no", "nunca", "sin", "muy", "un", "poco", "algo", ",", ".", "¿", "!", "—"};
  for (const auto& e : shipped().lexicon.entries()) vocab.push_back(e.lemma);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto n = rng() % 20;
    for (std::size_t i = 0; i < n; ++i) text += vocab[rng() % vocab.size()] + (rng() % 3 ? " " : "");
    const auto r = text_emotion(text, shipped());
    double sum = 0.0;
    for (double p : r.distribution.probabilities()) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.vad.valence >= -1.0);
    CHECK(r.vad.valence <= 1.0);
    CHECK(r.confidence <= 1.0);
  }
}

TEST_CASE("Spanish punctuation separates words") {
  const auto a = preprocess("¡estoy feliz!¿y tú?", shipped());
  REQUIRE(a.tokens.size() == 4);
  CHECK(a.tokens[0].surface == "estoy");
  CHECK(a.tokens[1].surface == "feliz");
  CHECK(a.tokens[3].surface == "tú");
}
