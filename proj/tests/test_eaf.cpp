#include <doctest.h>

#include "warden/eaf.hpp"
#include "warden/errors.hpp"
#include "warden/io.hpp"

using namespace warden;

namespace {

std::string fixture(const std::string& name) {
  return io::read_file(std::string(WARDEN_TEST_DATA) + "/" + name);
}

// minimal document builder for error-path cases
std::string wrap(const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<ANNOTATION_DOCUMENT>" + body +
         "</ANNOTATION_DOCUMENT>";
}

const char* kTimeOrder =
    "<TIME_ORDER>"
    "<TIME_SLOT TIME_SLOT_ID=\"ts1\" TIME_VALUE=\"0\"/>"
    "<TIME_SLOT TIME_SLOT_ID=\"ts2\" TIME_VALUE=\"1000\"/>"
    "</TIME_ORDER>";

}  // namespace

TEST_SUITE("eaf") {
  TEST_CASE("three annotations, middle translation absent") {
    const auto utterances = eaf::parse_eaf(fixture("sample_a.eaf"), "sample_a.eaf");
    REQUIRE(utterances.size() == 3);

    CHECK(utterances[0].id == "sample_a.eaf#a1");
    CHECK(utterances[0].source_file == "sample_a.eaf");
    CHECK(utterances[0].start_ms == 0);
    CHECK(utterances[0].end_ms == 5000);
    CHECK(utterances[0].transcription == "yibiyan wurrugu");
    CHECK(utterances[0].translation == "the old man");

    CHECK(utterances[1].transcription == "nganing-gin mama");
    CHECK(utterances[1].translation == "");

    CHECK(utterances[2].start_ms == 12000);
    CHECK(utterances[2].translation == "he is going");
  }

  TEST_CASE("annotations on other tiers are ignored") {
    const auto utterances = eaf::parse_eaf(fixture("sample_a.eaf"), "sample_a.eaf");
    for (const auto& u : utterances) {
      CHECK(u.transcription != "recording quality poor");
    }
  }

  TEST_CASE("tier names match case-insensitively") {
    // sample_b names its tiers Transcription/Translation
    const auto utterances = eaf::parse_eaf(fixture("sample_b.eaf"), "sample_b.eaf");
    REQUIRE(utterances.size() == 2);
    CHECK(utterances[0].transcription == "warda lagla");
  }

  TEST_CASE("alignable translations attach by exact span") {
    const auto utterances = eaf::parse_eaf(fixture("sample_b.eaf"), "sample_b.eaf");
    REQUIRE(utterances.size() == 2);
    CHECK(utterances[0].translation == "this country");
    CHECK(utterances[1].translation == "a long story about my place");
  }

  TEST_CASE("single alignable annotation with a reference translation") {
    const std::string doc = wrap(
        std::string(kTimeOrder) +
        "<TIER TIER_ID=\"transcription\"><ANNOTATION>"
        "<ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a1\" TIME_SLOT_REF1=\"ts1\" TIME_SLOT_REF2=\"ts2\">"
        "<ANNOTATION_VALUE>yibiyan</ANNOTATION_VALUE></ALIGNABLE_ANNOTATION>"
        "</ANNOTATION></TIER>"
        "<TIER TIER_ID=\"translation\"><ANNOTATION>"
        "<REF_ANNOTATION ANNOTATION_ID=\"t1\" ANNOTATION_REF=\"a1\">"
        "<ANNOTATION_VALUE>man</ANNOTATION_VALUE></REF_ANNOTATION>"
        "</ANNOTATION></TIER>");
    const auto utterances = eaf::parse_eaf(doc, "one.eaf");
    REQUIRE(utterances.size() == 1);
    CHECK(utterances[0].start_ms == 0);
    CHECK(utterances[0].end_ms == 1000);
    CHECK(utterances[0].transcription == "yibiyan");
    CHECK(utterances[0].translation == "man");
  }

  TEST_CASE("reference chains resolve transitively") {
    // translation -> gloss annotation -> transcription annotation
    const std::string doc = wrap(
        std::string(kTimeOrder) +
        "<TIER TIER_ID=\"transcription\"><ANNOTATION>"
        "<ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a1\" TIME_SLOT_REF1=\"ts1\" TIME_SLOT_REF2=\"ts2\">"
        "<ANNOTATION_VALUE>mama</ANNOTATION_VALUE></ALIGNABLE_ANNOTATION>"
        "</ANNOTATION></TIER>"
        "<TIER TIER_ID=\"gloss\"><ANNOTATION>"
        "<REF_ANNOTATION ANNOTATION_ID=\"g1\" ANNOTATION_REF=\"a1\">"
        "<ANNOTATION_VALUE>mother.N</ANNOTATION_VALUE></REF_ANNOTATION>"
        "</ANNOTATION></TIER>"
        "<TIER TIER_ID=\"translation\"><ANNOTATION>"
        "<REF_ANNOTATION ANNOTATION_ID=\"t1\" ANNOTATION_REF=\"g1\">"
        "<ANNOTATION_VALUE>mother</ANNOTATION_VALUE></REF_ANNOTATION>"
        "</ANNOTATION></TIER>");
    const auto utterances = eaf::parse_eaf(doc, "chain.eaf");
    REQUIRE(utterances.size() == 1);
    CHECK(utterances[0].translation == "mother");
  }

  TEST_CASE("missing tier") {
    const std::string doc = wrap(std::string(kTimeOrder) + "<TIER TIER_ID=\"transcription\"></TIER>");
    CHECK_THROWS_AS(eaf::parse_eaf(doc, "x.eaf"), MissingTier);
    CHECK_THROWS_AS(eaf::parse_eaf(doc, "x.eaf", "nope", "translation"), MissingTier);
  }

  TEST_CASE("malformed xml") {
    CHECK_THROWS_AS(eaf::parse_eaf("<ANNOTATION_DOCUMENT><TIER>", "x.eaf"), MalformedDocument);
    CHECK_THROWS_AS(eaf::parse_eaf("not xml at all", "x.eaf"), MalformedDocument);
  }

  TEST_CASE("wrong root element") {
    CHECK_THROWS_AS(eaf::parse_eaf("<WRONG_ROOT></WRONG_ROOT>", "x.eaf"), MalformedDocument);
  }

  TEST_CASE("missing time order") {
    const std::string doc = wrap("<TIER TIER_ID=\"transcription\"></TIER>");
    CHECK_THROWS_AS(eaf::parse_eaf(doc, "x.eaf"), MalformedDocument);
  }

  TEST_CASE("unresolved time slot") {
    const std::string doc = wrap(
        std::string(kTimeOrder) +
        "<TIER TIER_ID=\"transcription\"><ANNOTATION>"
        "<ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a1\" TIME_SLOT_REF1=\"ts1\" TIME_SLOT_REF2=\"ts9\">"
        "<ANNOTATION_VALUE>yibiyan</ANNOTATION_VALUE></ALIGNABLE_ANNOTATION>"
        "</ANNOTATION></TIER>"
        "<TIER TIER_ID=\"translation\"></TIER>");
    CHECK_THROWS_AS(eaf::parse_eaf(doc, "x.eaf"), UnresolvedTimeSlot);
  }

  TEST_CASE("empty-valued and zero-length annotations are dropped") {
    const std::string doc = wrap(
        "<TIME_ORDER>"
        "<TIME_SLOT TIME_SLOT_ID=\"ts1\" TIME_VALUE=\"0\"/>"
        "<TIME_SLOT TIME_SLOT_ID=\"ts2\" TIME_VALUE=\"1000\"/>"
        "<TIME_SLOT TIME_SLOT_ID=\"ts3\" TIME_VALUE=\"1000\"/>"
        "</TIME_ORDER>"
        "<TIER TIER_ID=\"transcription\">"
        "<ANNOTATION><ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a1\" TIME_SLOT_REF1=\"ts1\" "
        "TIME_SLOT_REF2=\"ts2\"><ANNOTATION_VALUE>  </ANNOTATION_VALUE>"
        "</ALIGNABLE_ANNOTATION></ANNOTATION>"
        "<ANNOTATION><ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a2\" TIME_SLOT_REF1=\"ts2\" "
        "TIME_SLOT_REF2=\"ts3\"><ANNOTATION_VALUE>ok</ANNOTATION_VALUE>"
        "</ALIGNABLE_ANNOTATION></ANNOTATION>"
        "<ANNOTATION><ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a3\" TIME_SLOT_REF1=\"ts1\" "
        "TIME_SLOT_REF2=\"ts3\"><ANNOTATION_VALUE>kept</ANNOTATION_VALUE>"
        "</ALIGNABLE_ANNOTATION></ANNOTATION>"
        "</TIER><TIER TIER_ID=\"translation\"></TIER>");
    // a1 is blank, a2 is zero-length, a3 survives
    const auto utterances = eaf::parse_eaf(doc, "x.eaf");
    REQUIRE(utterances.size() == 1);
    CHECK(utterances[0].transcription == "kept");
  }

  TEST_CASE("source file must be named") {
    CHECK_THROWS_AS(eaf::parse_eaf("<ANNOTATION_DOCUMENT/>", ""), std::invalid_argument);
  }

  TEST_CASE("utterances arrive sorted by time") {
    const auto utterances = eaf::parse_eaf(fixture("sample_a.eaf"), "sample_a.eaf");
    for (std::size_t i = 1; i < utterances.size(); ++i) {
      CHECK(utterances[i - 1].start_ms <= utterances[i].start_ms);
    }
  }
}
