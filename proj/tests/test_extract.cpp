#include "extraction_corpus.hpp"

#include "revinv/error.hpp"
#include "revinv/extract.hpp"

#include <doctest.h>

#include <sstream>

using namespace revinv;

namespace {

Occurrence occ(const std::string& predicate, std::optional<std::string> message, const std::string& tx,
               StatementKind kind = StatementKind::Require, std::size_t line = 3) {
    return {predicate, std::move(message), kind, Provenance{tx, "0xc", "f", "A.sol", line}};
}

}  // namespace

TEST_SUITE("extract") {

TEST_CASE("labelled snippet corpus") {
    for (const auto& c : extraction_corpus()) {
        CAPTURE(c.name);
        const auto got = extract_predicate(c.source, c.line, c.language);
        CHECK(got.kind == c.kind);
        CHECK(got.predicate == c.predicate);
        CHECK(got.message == c.message);
        CHECK(normalize(got.predicate) == c.normalized);
    }
}

TEST_CASE("lines without a guard fail extraction") {
    const std::string src = "contract C {\n  uint x;\n  function f() external { x = 1; }\n}\n";
    CHECK_THROWS_AS(extract_predicate(src, 2), ExtractionFailure);
    CHECK_THROWS_AS(extract_predicate(src, 3), ExtractionFailure);
    CHECK_THROWS_AS(extract_predicate(src, 99), ArgumentError);
    CHECK_THROWS_AS(extract_predicate("if (x) { y = 1; }\n", 1), ExtractionFailure);
}

TEST_CASE("keywords inside identifiers and strings are ignored") {
    CHECK_THROWS_AS(extract_predicate("x = requireFoo(a);\n", 1), ExtractionFailure);
    CHECK_THROWS_AS(extract_predicate("s = \"require(a)\";\n", 1), ExtractionFailure);
    CHECK_THROWS_AS(extract_predicate("lib.require(a);\n", 1), ExtractionFailure);
}

TEST_CASE("malformed guards raise ParseError") {
    CHECK_THROWS_AS(extract_predicate("require(a > (b, \"x\");\n", 1), ParseError);
    CHECK_THROWS_AS(extract_predicate("require(a, \"open);\n", 1), ParseError);
    CHECK_THROWS_AS(extract_predicate("require(, \"m\");\n", 1), ParseError);
}

TEST_CASE("bundle lookup") {
    SourceBundle b;
    b.files["A.sol"] = "contract A {\n  function f() external { require(ok); }\n}\n";
    CHECK(extract_predicate(b, "A.sol", 2).predicate == "ok");
    CHECK_THROWS_AS(extract_predicate(b, "B.sol", 2), ArgumentError);
}

TEST_CASE("failure location parsing") {
    const auto loc = parse_failure_location("contracts/Token.sol:42");
    REQUIRE(loc);
    CHECK(loc->file == "contracts/Token.sol");
    CHECK(loc->line == 42);
    CHECK_FALSE(parse_failure_location("Token.sol"));
    CHECK_FALSE(parse_failure_location("Token.sol:"));
    CHECK_FALSE(parse_failure_location(":3"));
    CHECK_FALSE(parse_failure_location("Token.sol:0"));
    CHECK_FALSE(parse_failure_location("Token.sol:4x"));
}

TEST_CASE("normalize") {
    CHECK(normalize("  Balance  >=\n\tAmount ") == "balance >= amount");
    CHECK(normalize("((a))") == "a");
    CHECK(normalize("(a) && (b)") == "(a) && (b)");
    CHECK(normalize("a /* x */ > b // tail") == "a > b");
    CHECK(normalize("s == \"Keep  CASE\"") == "s == \"keep  case\"");
    CHECK(normalize("f(\")\") == (x)") == "f(\")\") == (x)");
    CHECK_THROWS_AS(normalize("  "), DegenerateError);
    CHECK_THROWS_AS(normalize("( )"), DegenerateError);
    CHECK_THROWS_AS(normalize("/* only */"), DegenerateError);
}

TEST_CASE("normalize_message") {
    CHECK(normalize_message("  ERC20:   transfer\namount ") == "erc20: transfer amount");
    CHECK_FALSE(normalize_message(" \n "));
}

TEST_CASE("invariant ids are stable and distinct") {
    CHECK(invariant_id("a > b") == invariant_id("a > b"));
    CHECK(invariant_id("a > b") != invariant_id("a >= b"));
    CHECK(invariant_id("x").rfind("inv-", 0) == 0);
    CHECK(invariant_id("x").size() == 16);
}

TEST_CASE("deduplicate merges by predicate") {
    const std::vector<Occurrence> occs{
        occ("a > b", "low", "0x1"),
        occ("a > b", "low", "0x2"),
        occ("a > b", "alt", "0x3", StatementKind::Assert),
        occ("a > b", std::nullopt, "0x3", StatementKind::Assert, 9),
        occ("c", std::nullopt, "0x4"),
        occ("b", "m2", "0x5"),
        occ("b", "m1", "0x6"),
    };
    const auto recs = deduplicate(occs);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].predicate == "a > b");
    CHECK(recs[0].support == 3);
    CHECK(recs[0].provenance.size() == 4);
    CHECK(recs[0].message == "low");
    CHECK(recs[0].kind == StatementKind::Require);
    CHECK(recs[1].predicate == "b");
    CHECK(recs[1].message == "m1");
    CHECK(recs[2].predicate == "c");
    CHECK_FALSE(recs[2].message);
    CHECK(recs[2].id == invariant_id("c"));
    CHECK(deduplicate(std::vector<Occurrence>{}).empty());
}

TEST_CASE("views") {
    const std::vector<Occurrence> occs{occ("x > 0", "positive", "0x1"), occ("y", std::nullopt, "0x2")};
    const auto recs = deduplicate(occs);
    const auto pred = build_views(recs, ViewMode::PredicateOnly);
    const auto msg = build_views(recs, ViewMode::PredicateWithMessage);
    CHECK(pred[0].text == "x > 0");
    CHECK(msg[0].text == "x > 0 :: positive");
    CHECK(msg[1].text == "y");
    CHECK(parse_view_mode("message") == ViewMode::PredicateWithMessage);
    CHECK_THROWS_AS(parse_view_mode("both"), ArgumentError);
}

TEST_CASE("invariants JSONL round-trip") {
    const std::vector<Occurrence> occs{occ("x > 0", "positive", "0x1"), occ("x > 0", std::nullopt, "0x2"),
                                       occ("!p", std::nullopt, "0x3", StatementKind::IfRevert)};
    const auto recs = deduplicate(occs);
    std::stringstream ss;
    write_invariants(ss, recs);
    CHECK(read_invariants(ss) == recs);

    std::stringstream bad("{\"predicate\": \"x\"}\n");
    CHECK_THROWS_AS(read_invariants(bad), ParseError);
    std::stringstream kind("{\"predicate\":\"x\",\"statement_kind\":\"panic\",\"support\":1}\n");
    CHECK_THROWS_AS(read_invariants(kind), FormatError);
}

}
