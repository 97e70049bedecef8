// Copyright 2026 The framekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "framekit/codecs.hpp"
#include "framekit/llm_client.hpp"

using namespace framekit;

namespace {

std::vector<std::pair<std::string, std::string>> pairs(const PredictionSet& p) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : p.entries) out.emplace_back(e.fe_name, e.text);
  return out;
}

std::vector<std::pair<std::string, std::string>> gold_pairs(const FrameInstance& inst) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& fe : inst.fes) out.emplace_back(fe.name, fe.span.text);
  return out;
}

using P = std::vector<std::pair<std::string, std::string>>;

}  // namespace

TEST(MarkTarget, DonationSentence) {
  auto inst = fixtures::donation_instance();
  MarkedSentence m = mark_target(inst.sentence_text, inst.target);
  EXPECT_EQ(m.marked, "Your **contribution** to Goodwill will mean more than you may know.");
  EXPECT_EQ(strip_target_marks(m.marked), inst.sentence_text);
}

TEST(MarkTarget, WholeSentenceAndDisjointSpans) {
  std::string s = "Kim gave up.";
  EXPECT_EQ(mark_target(s, {make_span(s, 0, 12)}).marked, "**Kim gave up.**");
  EXPECT_EQ(mark_target(s, {make_span(s, 4, 8), make_span(s, 9, 11)}).marked, "Kim **gave** **up**.");
}

TEST(MarkTarget, OverlapRejected) {
  std::string s = "Kim gave up.";
  try {
    mark_target(s, {make_span(s, 0, 5), make_span(s, 4, 8)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OverlappingTarget);
  }
}

TEST(Encode, ReferenceEncodings) {
  auto inst = fixtures::donation_instance();
  auto frame = fixtures::giving_frame();
  EXPECT_EQ(encode(RepresentationFormat::Markdown, inst, frame), "- Donor: Your\n- Recipient: to Goodwill");
  EXPECT_EQ(encode(RepresentationFormat::XmlTags, inst, frame),
            "<Donor>Your</Donor> contribution <Recipient>to Goodwill</Recipient> will mean more than you may know.");
  EXPECT_EQ(encode(RepresentationFormat::JsonExisting, inst, frame),
            R"({"Donor": "Your", "Recipient": "to Goodwill"})");
  EXPECT_EQ(encode(RepresentationFormat::JsonComplete, inst, frame),
            R"({"Donor": "Your", "Recipient": "to Goodwill", "Theme": "", "Place": ""})");
}

TEST(Encode, MarkdownWithoutFesIsEmpty) {
  auto inst = fixtures::donation_instance();
  inst.fes.clear();
  EXPECT_EQ(encode(RepresentationFormat::Markdown, inst, fixtures::giving_frame()), "");
  EXPECT_EQ(encode(RepresentationFormat::JsonExisting, inst, fixtures::giving_frame()), "{}");
}

TEST(Encode, DuplicateNamesBecomeList) {
  auto inst = fixtures::donation_instance();
  inst.fes[1].name = "Donor";
  auto frame = fixtures::giving_frame();
  std::string out = encode(RepresentationFormat::JsonExisting, inst, frame);
  EXPECT_EQ(out, R"({"Donor": ["Your", "to Goodwill"]})");
  PredictionSet p = decode(RepresentationFormat::JsonExisting, out, frame, inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}, {"Donor", "to Goodwill"}}));
  try {
    encode(RepresentationFormat::JsonExisting, inst, frame, EncodeOptions{false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateFeInJson);
  }
}

TEST(Encode, XmlNestedSpansRejected) {
  auto inst = fixtures::donation_instance();
  inst.fes.push_back({"Theme", make_span(inst.sentence_text, 21, 29), false});
  try {
    encode(RepresentationFormat::XmlTags, inst, fixtures::giving_frame());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NestedSpans);
  }
}

TEST(Encode, JsonCompleteKeysEqualFrameFes) {
  const auto& lex = *fixtures::synthetic().cache.lexicon;
  for (const auto& frame : lex.frames()) {
    std::string out = encode_fes(RepresentationFormat::JsonComplete, "x", {}, frame);
    PredictionSet p = decode(RepresentationFormat::JsonComplete, out, frame, "x");
    EXPECT_TRUE(p.entries.empty());
    for (const auto& fe : frame.fe_defs) EXPECT_NE(out.find("\"" + fe.name + "\": \"\""), std::string::npos);
  }
}

TEST(ExtractCodeBlock, Examples) {
  CodeBlock a = extract_code_block("```json\n{\"Law\": \"regulations\"}\n```");
  EXPECT_EQ(a.content, R"({"Law": "regulations"})");
  EXPECT_TRUE(a.warnings.empty());

  CodeBlock b = extract_code_block("{\"A\": \"b\"}");
  EXPECT_EQ(b.content, R"({"A": "b"})");
  ASSERT_EQ(b.warnings.size(), 1u);
  EXPECT_EQ(b.warnings[0].kind, WarningKind::NoCodeFence);

  CodeBlock c = extract_code_block("```\nfirst\n```\ntext\n```\nsecond\n```");
  EXPECT_EQ(c.content, "first");

  CodeBlock d = extract_code_block("```\nplain\n```\n```json\n{}\n```");
  EXPECT_EQ(d.content, "{}");

  CodeBlock e = extract_code_block("```json\n{\"A\": \"b\"");
  EXPECT_TRUE(std::any_of(e.warnings.begin(), e.warnings.end(),
                          [](const auto& w) { return w.kind == WarningKind::UnterminatedFence; }));
}

TEST(Decode, JsonExistingReference) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::JsonExisting, R"({"Donor": "Your", "Recipient": "to Goodwill"})",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}, {"Recipient", "to Goodwill"}}));
  for (const auto& w : p.warnings) EXPECT_EQ(w.kind, WarningKind::NoCodeFence);
}

TEST(Decode, JsonCompleteDropsEmptyValues) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::JsonComplete,
                           "```json\n{\"Donor\": \"Your\", \"Theme\": \"\", \"Place\": \"\"}\n```",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}}));
  EXPECT_TRUE(p.warnings.empty());
}

TEST(Decode, MarkdownUnknownFeKeptAndWarned) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::Markdown, "- Donor: Your\n- Bogus: x", fixtures::giving_frame(),
                           inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}, {"Bogus", "x"}}));
  EXPECT_TRUE(p.entries[0].known);
  EXPECT_FALSE(p.entries[1].known);
  EXPECT_TRUE(p.has_warning(WarningKind::UnknownFe));
}

TEST(Decode, MarkdownTolerantListSyntax) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::Markdown, "* **Donor**: Your\n- Recipient: to Goodwill: really",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}, {"Recipient", "to Goodwill: really"}}));
}

TEST(Decode, JsonRepairTrailingCommaAndSmartQuotes) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::JsonExisting, "```json\n{“Donor”: “Your”,}\n```",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}}));
  EXPECT_TRUE(p.has_warning(WarningKind::JsonRepaired));
}

TEST(Decode, SingleQuotedObjectRecovered) {
  std::string s = "the promulgation of regulations on nuclear exports";
  FrameDef law;
  law.name = "Law";
  law.fe_defs = {{"Law", "Law", Coreness::Core, "", {}}, {"Forbidden", "Forb", Coreness::Core, "", {}}};
  PredictionSet p = decode(RepresentationFormat::JsonExisting,
                           "```json{'Law': 'regulations', 'Forbidden': 'on nuclear exports'}```", law, s);
  EXPECT_EQ(pairs(p), (P{{"Law", "regulations"}, {"Forbidden", "on nuclear exports"}}));
}

TEST(Decode, GarbageIsUnparseableNotFatal) {
  PredictionSet p = decode(RepresentationFormat::JsonExisting, "I cannot help with that.", fixtures::giving_frame(),
                           "x");
  EXPECT_TRUE(p.entries.empty());
  EXPECT_FALSE(p.warnings.empty());
  PredictionSet q = decode(RepresentationFormat::XmlTags, "", fixtures::giving_frame(), "x");
  EXPECT_TRUE(q.has_warning(WarningKind::EmptyOutput));
}

TEST(Decode, XmlMutatedSentenceWarned) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::XmlTags, "<Donor>Your</Donor> gift to charity.",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}}));
  EXPECT_TRUE(p.has_warning(WarningKind::SentenceMutated));
}

TEST(Decode, XmlUnclosedTagDropped) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::XmlTags,
                           "<Donor>Your</Donor> contribution <Recipient>to Goodwill will mean more than you may know.",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), (P{{"Donor", "Your"}}));
  EXPECT_TRUE(p.has_warning(WarningKind::UnclosedTag));
}

TEST(Decode, XmlStripsTargetMarks) {
  auto inst = fixtures::donation_instance();
  PredictionSet p = decode(RepresentationFormat::XmlTags,
                           "<Donor>Your</Donor> **contribution** <Recipient>to Goodwill</Recipient> will mean more "
                           "than you may know.",
                           fixtures::giving_frame(), inst.sentence_text);
  EXPECT_EQ(pairs(p), gold_pairs(inst));
  EXPECT_FALSE(p.has_warning(WarningKind::SentenceMutated));
}

TEST(Align, FirstOccurrenceAndMisses) {
  auto inst = fixtures::donation_instance();
  auto s = align_to_span("to Goodwill", inst.sentence_text);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->start, 18u);
  EXPECT_EQ(s->end, 29u);
  EXPECT_FALSE(align_to_span("xyzzy", inst.sentence_text));
  std::string t = "the cat saw the dog";
  auto first = align_to_span("the", t);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->start, 0u);
  EXPECT_FALSE(align_to_span("the", t, OccurrencePolicy::UniqueOnly));
  auto u = align_to_span("Zoë", "to Zoë.");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->start, 3u);
  EXPECT_EQ(u->end, 6u);
}

TEST(Formats, NamesRoundTrip) {
  for (auto f : kAllFormats) EXPECT_EQ(parse_format(format_name(f)), f);
  EXPECT_FALSE(parse_format("yaml"));
}

TEST(RoundTrip, AllFormatsOverSyntheticCorpus) {
  const auto& s = fixtures::synthetic();
  std::size_t checked = 0;
  for (const auto* part : {&s.cache.train, &s.cache.test}) {
    for (const auto& inst : part->instances) {
      const FrameDef* frame = s.cache.lexicon->find_frame(inst.frame_name);
      ASSERT_NE(frame, nullptr);
      auto gold = gold_pairs(inst);
      auto sorted_gold = gold;
      std::sort(sorted_gold.begin(), sorted_gold.end());
      for (auto f : kAllFormats) {
        std::string text = fenced(f, encode(f, inst, *frame));
        auto got = pairs(decode(f, text, *frame, inst.sentence_text));
        std::sort(got.begin(), got.end());
        ASSERT_EQ(got, sorted_gold) << format_name(f) << " " << inst.instance_id;
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 20000u);
}
