#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace etsl;
using testutil::toks;

TEST_CASE("whitespace tokenization lowercases by default") {
  CHECK(tokenize_words("Okula Gitti") == toks({"okula", "gitti"}));
  CHECK(tokenize_words("  çok   iyi \t bir  gün \n") ==
        toks({"çok", "iyi", "bir", "gün"}));
  CHECK(tokenize_words("").empty());
  CHECK(tokenize_words("   \t ").empty());
}

TEST_CASE("turkish casing maps I to dotless and dotted I to i") {
  CHECK(tokenize_words("ISPARTA") == toks({"ısparta"}));
  CHECK(tokenize_words("İstanbul") == toks({"istanbul"}));
  CHECK(tokenize_words("DİYARBAKIR") == toks({"diyarbakır"}));
  TokenizerOptions ascii;
  ascii.turkish = false;
  CHECK(tokenize_words("ISPARTA", ascii) == toks({"isparta"}));
  TokenizerOptions keep;
  keep.lowercase = false;
  CHECK(tokenize_words("Okula Gitti", keep) == toks({"Okula", "Gitti"}));
}

TEST_CASE("turkish special letters survive lowercasing") {
  CHECK(lowercase_utf8("ÇĞÖŞÜ", true) == "çğöşü");
  CHECK(lowercase_utf8("AĞAÇ", true) == "ağaç");
}

TEST_CASE("punctuation stripping removes ascii and typographic marks") {
  TokenizerOptions strip;
  strip.strip_punctuation = true;
  CHECK(tokenize_words("eve, gitti.", strip) == toks({"eve", "gitti"}));
  CHECK(tokenize_words("“merhaba” – dedi", strip) ==
        toks({"merhaba", "dedi"}));
  // a token that is pure punctuation disappears
  CHECK(tokenize_words("evet ... hayır", strip) == toks({"evet", "hayır"}));
  // default keeps punctuation attached
  CHECK(tokenize_words("eve, gitti.") == toks({"eve,", "gitti."}));
}

TEST_CASE("vocabulary reserves the first four ids") {
  Vocabulary v;
  CHECK(v.size() == 4);
  CHECK(v.token_of(Vocabulary::kPad) == "<pad>");
  CHECK(v.token_of(Vocabulary::kBos) == "<bos>");
  CHECK(v.token_of(Vocabulary::kEos) == "<eos>");
  CHECK(v.token_of(Vocabulary::kUnk) == "<unk>");
  CHECK_THROWS_AS(v.token_of(4), EtslError);
  CHECK_THROWS_AS(v.token_of(-1), EtslError);
}

TEST_CASE("vocabulary build orders by frequency then spelling") {
  Vocabulary v = Vocabulary::build({"b a b", "c a b", "c"});
  // freq: b=3, a=2, c=2 -> ids 4:b, then the tie breaks as 'a' < 'c'
  CHECK(v.size() == 7);
  CHECK(v.id_of("b") == 4);
  CHECK(v.id_of("a") == 5);
  CHECK(v.id_of("c") == 6);
  CHECK(v.id_of("zzz") == Vocabulary::kUnk);
}

TEST_CASE("vocabulary max_size caps total size including reserved ids") {
  Vocabulary v = Vocabulary::build({"a b c d e f"}, {}, 6);
  CHECK(v.size() == 6);
  CHECK(v.id_of("a") == 4);
  CHECK(v.id_of("b") == 5);
  CHECK(v.id_of("c") == Vocabulary::kUnk);
}

TEST_CASE("encode maps unknown and reserved spellings to UNK") {
  Vocabulary v = Vocabulary::build({"okula gitti"});
  auto ids = v.encode("Okula dün gitti");
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == v.id_of("okula"));
  CHECK(ids[1] == Vocabulary::kUnk);
  CHECK(ids[2] == v.id_of("gitti"));
  // a transcript containing the literal reserved spelling cannot alias it
  auto tricky = v.encode("<bos> okula");
  CHECK(tricky[0] == Vocabulary::kUnk);
}

TEST_CASE("decode skips structural tokens and round-trips known words") {
  Vocabulary v = Vocabulary::build({"okula gitti dün"});
  std::vector<int> ids{Vocabulary::kBos};
  for (int id : v.encode("okula gitti")) ids.push_back(id);
  ids.push_back(Vocabulary::kEos);
  ids.push_back(Vocabulary::kPad);
  CHECK(v.decode(ids) == "okula gitti");
  CHECK(v.decode({}) == "");
  CHECK(v.decode({Vocabulary::kUnk}) == "<unk>");
}

TEST_CASE("vocabulary reconstruction from an ordered token list") {
  Vocabulary v = Vocabulary::build({"c b a c b c"});
  Vocabulary w = Vocabulary::from_tokens(v.tokens());
  CHECK(w.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(w.token_of(static_cast<int>(i)) == v.token_of(static_cast<int>(i)));
  CHECK_THROWS_AS(Vocabulary::from_tokens({"<pad>", "<bos>"}), EtslError);
  CHECK_THROWS_AS(Vocabulary::from_tokens({"a", "b", "c", "d", "e"}), EtslError);
}

TEST_CASE("word collisions with reserved spellings are dropped at build") {
  Vocabulary v = Vocabulary::build({"<unk> okula <pad>"});
  CHECK(v.size() == 5);  // only "okula" added
  CHECK(v.id_of("okula") == 4);
}
