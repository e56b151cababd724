#pragma once

// Guard-statement snippets with hand-written expected extractions. Each
// snippet is a full source text; `line` is the reported revert line.

#include "revinv/extract.hpp"

#include <optional>
#include <string>
#include <vector>

struct ExtractionCase {
    const char* name;
    revinv::SourceLanguage language;
    std::string source;
    std::size_t line;
    revinv::StatementKind kind;
    std::string predicate;   // as written
    std::optional<std::string> message;
    std::string normalized;  // expected normalize(predicate)
};

inline std::vector<ExtractionCase> extraction_corpus() {
    using revinv::SourceLanguage;
    using revinv::StatementKind;
    const auto Sol = SourceLanguage::Solidity;
    const auto Vy = SourceLanguage::Vyper;
    const auto Req = StatementKind::Require;
    const auto Asr = StatementKind::Assert;
    const auto If = StatementKind::IfRevert;
    auto fn = [](const std::string& body) { return "contract C {\n  function f() external {\n" + body + "\n  }\n}\n"; };
    return {
        // Exemplar strings of the reference cluster table.
        {"budget guard", Sol, fn("    require(balanceOf(from) >= amount, \"ERC20: insufficient\");"), 3, Req,
         "balanceOf(from) >= amount", "ERC20: insufficient", "balanceof(from) >= amount"},
        {"slippage", Sol, fn("    require(amountOut >= amountOutMin, 'INSUFFICIENT_OUTPUT_AMOUNT');"), 3, Req,
         "amountOut >= amountOutMin", "INSUFFICIENT_OUTPUT_AMOUNT", "amountout >= amountoutmin"},
        {"fee exemption", Sol, fn("    require(isExcludedFromFees[from]||isExcludedFromFees[to]);"), 3, Req,
         "isExcludedFromFees[from]||isExcludedFromFees[to]", std::nullopt,
         "isexcludedfromfees[from]||isexcludedfromfees[to]"},
        {"deadline if-revert", Sol, fn("    if (block.timestamp > deadline) revert Expired();"), 3, If,
         "block.timestamp > deadline", "Expired", "block.timestamp > deadline"},
        {"reserves", Sol, fn("    require(reserveIn > 0 && reserveOut > 0, \"INSUFFICIENT_LIQUIDITY\");"), 3, Req,
         "reserveIn > 0 && reserveOut > 0", "INSUFFICIENT_LIQUIDITY", "reservein > 0 && reserveout > 0"},
        {"feature toggle", Sol, fn("    require(tradeEnabled, \"Trading not enabled\");"), 3, Req, "tradeEnabled",
         "Trading not enabled", "tradeenabled"},
        {"not launched", Sol, fn("    require(!launched);"), 3, Req, "!launched", std::nullopt, "!launched"},
        {"struct flag", Sol, fn("    require(!data.tradingEnabled, \"already\");"), 3, Req, "!data.tradingEnabled",
         "already", "!data.tradingenabled"},
        {"replay", Sol, fn("    require(!usedClaims[claimLeaf], \"claimed\");"), 3, Req, "!usedClaims[claimLeaf]",
         "claimed", "!usedclaims[claimleaf]"},
        {"paused doubled parens", Sol, fn("    require((!paused));"), 3, Req, "(!paused)", std::nullopt, "!paused"},
        {"merkle", Sol, fn("    require(!MerkleProof.verify(proof, merkleRoot, leaf), \"bad proof\");"), 3, Req,
         "!MerkleProof.verify(proof, merkleRoot, leaf)", "bad proof", "!merkleproof.verify(proof, merkleroot, leaf)"},
        {"sender budget", Sol, fn("    require(balances[msg.sender] >= _amount);"), 3, Req,
         "balances[msg.sender] >= _amount", std::nullopt, "balances[msg.sender] >= _amount"},
        {"payment", Sol, fn("    require(_amount * price == msg.value, \"Wrong price\");"), 3, Req,
         "_amount * price == msg.value", "Wrong price", "_amount * price == msg.value"},
        {"blacklist", Sol, fn("    require(!isBlacklisted[msg.sender], \"Blacklisted\");"), 3, Req,
         "!isBlacklisted[msg.sender]", "Blacklisted", "!isblacklisted[msg.sender]"},
        {"cooldown", Sol, fn("    require(cooldown[to] < block.timestamp);"), 3, Req, "cooldown[to] < block.timestamp",
         std::nullopt, "cooldown[to] < block.timestamp"},
        {"nonce custom error", Sol, fn("    if (allowed.nonce != nonce) {\n      revert InvalidNonce(nonce);\n    }"), 3,
         If, "allowed.nonce != nonce", "InvalidNonce", "allowed.nonce != nonce"},
        {"supply cap", Sol, fn("    require(totalSupply() + mint_amount <= MAX_SUPPLY, \"cap\");"), 3, Req,
         "totalSupply() + mint_amount <= MAX_SUPPLY", "cap", "totalsupply() + mint_amount <= max_supply"},
        {"access control", Sol, fn("    require(owner() == _msgSender(), \"Ownable: caller is not the owner\");"), 3,
         Req, "owner() == _msgSender()", "Ownable: caller is not the owner", "owner() == _msgsender()"},
        {"address sanity", Sol, fn("    require(recipient != address(0));"), 3, Req, "recipient != address(0)",
         std::nullopt, "recipient != address(0)"},
        {"low-level", Sol, fn("    require(success&&(data.length==0||abi.decode(data,(bool))), 'TRANSFER_FAILED');"),
         3, Req, "success&&(data.length==0||abi.decode(data,(bool)))", "TRANSFER_FAILED",
         "success&&(data.length==0||abi.decode(data,(bool)))"},
        {"budget floor", Sol, fn("    require(balance >= amount);"), 3, Req, "balance >= amount", std::nullopt,
         "balance >= amount"},

        // Statement shapes.
        {"assert", Sol, fn("    assert(x + y >= x);"), 3, Asr, "x + y >= x", std::nullopt, "x + y >= x"},
        {"if revert string", Sol, fn("    if (msg.value < fee) revert(\"fee\");"), 3, If, "msg.value < fee", "fee",
         "msg.value < fee"},
        {"if block revert string", Sol, fn("    if (!ok) {\n      revert(\"not ok\");\n    }"), 3, If, "!ok", "not ok",
         "!ok"},
        {"if throw", Sol, fn("    if (msg.sender != owner) throw;"), 3, If, "msg.sender != owner", std::nullopt,
         "msg.sender != owner"},
        {"multi-line require, first line", Sol,
         fn("    require(\n      amountA >= amountAMin,\n      \"INSUFFICIENT_A_AMOUNT\"\n    );"), 3, Req,
         "amountA >= amountAMin", "INSUFFICIENT_A_AMOUNT", "amounta >= amountamin"},
        {"multi-line require, inner line", Sol,
         fn("    require(\n      amountA >= amountAMin,\n      \"INSUFFICIENT_A_AMOUNT\"\n    );"), 5, Req,
         "amountA >= amountAMin", "INSUFFICIENT_A_AMOUNT", "amounta >= amountamin"},
        {"multi-line condition", Sol,
         fn("    require(a > 0 &&\n            b > 0 &&\n            c > 0, \"zero\");"), 4, Req,
         "a > 0 &&\n            b > 0 &&\n            c > 0", "zero", "a > 0 && b > 0 && c > 0"},
        {"nested parens", Sol, fn("    require(((a + (b * c)) > (d - e)), \"math\");"), 3, Req,
         "((a + (b * c)) > (d - e))", "math", "(a + (b * c)) > (d - e)"},
        {"comma in string", Sol, fn("    require(ok, \"a, b, c\");"), 3, Req, "ok", "a, b, c", "ok"},
        {"paren in string", Sol, fn("    require(ok, \"(unbalanced\");"), 3, Req, "ok", "(unbalanced", "ok"},
        {"string in predicate", Sol, fn("    require(keccak256(bytes(s)) != keccak256(\"a,b\"), \"dup\");"), 3, Req,
         "keccak256(bytes(s)) != keccak256(\"a,b\")", "dup", "keccak256(bytes(s)) != keccak256(\"a,b\")"},
        {"concatenated message", Sol, fn("    require(ok, \"part one \" \"part two\");"), 3, Req, "ok",
         "part one part two", "ok"},
        {"comment inside", Sol, fn("    require(a /* lhs */ == b, \"eq\"); // trailing"), 3, Req, "a           == b",
         "eq", "a == b"},
        {"two guards on the line", Sol, fn("    require(a > 0); require(b > 0);"), 3, Req, "a > 0", std::nullopt,
         "a > 0"},
        {"guard after an unrelated if", Sol, fn("    if (x) { y = 1; }\n    require(z != 0, \"z\");"), 4, Req,
         "z != 0", "z", "z != 0"},
        {"message is an expression", Sol, fn("    require(ok, string(abi.encodePacked(\"bad \", reason)));"), 3,
         Req, "ok", "string(abi.encodePacked(\"bad \", reason))", "ok"},
        {"custom error with args", Sol, fn("    if (bal < amt) revert Insufficient({have: bal, need: amt});"), 3, If,
         "bal < amt", "Insufficient", "bal < amt"},

        // Vyper.
        {"vyper assert", Vy, "@external\ndef f(deadline: uint256):\n    assert block.timestamp <= deadline, \"expired\"\n",
         3, Asr, "block.timestamp <= deadline", "expired", "block.timestamp <= deadline"},
        {"vyper if raise", Vy, "@external\ndef f():\n    if self.paused: raise \"paused\"\n", 3, If, "self.paused",
         "paused", "self.paused"},
    };
}
