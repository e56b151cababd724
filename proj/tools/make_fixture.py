#!/usr/bin/env python3
"""Regenerate the bundled fixture under data/fixture.

Writes a small failed-transaction corpus, the verified sources it points
into, a search grid, and synthetic per-view vector files. The vector files
need invariant ids, so the script runs `revinv extract` on the corpus first.

    python3 tools/make_fixture.py --cli build/revinv
"""

import argparse
import json
import math
import random
import shutil
import subprocess
import tempfile
from pathlib import Path

# Guard families. Each entry is (family, guard source lines).
FAMILIES = {
    "balance": [
        'require(balanceOf[from] >= amount, "ERC20: transfer amount exceeds balance");',
        'require(balances[msg.sender] >= value, "insufficient balance");',
        "require(_balances[account] >= burnAmount);",
        "if (userBalance[user] < wad) revert InsufficientBalance();",
        'require(balanceOf[src] >= wad, "ds-token-insufficient-balance");',
    ],
    "allowance": [
        'require(allowance[from][msg.sender] >= amount, "ERC20: insufficient allowance");',
        'require(allowed[owner][spender] >= value, "allowance too low");',
        "require(_allowances[sender][_msgSender()] >= transferAmount);",
        "if (approvals[src][msg.sender] < wad) revert InsufficientAllowance();",
        'require(allowance[src][msg.sender] >= wad, "ds-token-insufficient-approval");',
    ],
    "owner": [
        'require(msg.sender == owner, "Ownable: caller is not the owner");',
        "if (msg.sender != admin) revert Unauthorized();",
        'require(owner == msg.sender, "!owner");',
        'require(msg.sender == governance, "!governance");',
        "require(_msgSender() == _owner);",
    ],
    "deadline": [
        'require(block.timestamp <= deadline, "UniswapV2Router: EXPIRED");',
        'require(deadline >= block.timestamp, "Router: EXPIRED");',
        'require(block.timestamp < expiry, "expired");',
        "if (block.timestamp > validUntil) revert Expired();",
        'require(block.timestamp >= startTime, "not started");',
    ],
    "zero_address": [
        'require(to != address(0), "ERC20: transfer to the zero address");',
        'require(recipient != address(0), "zero recipient");',
        'require(newOwner != address(0), "Ownable: new owner is the zero address");',
        "if (receiver == address(0)) revert ZeroAddress();",
        'require(spender != address(0), "ERC20: approve to the zero address");',
    ],
    "paused": [
        'require(!paused, "Pausable: paused");',
        "require((!paused));",
        "if (paused) revert Paused();",
        'require(!frozen[msg.sender], "account frozen");',
        'require(!_paused, "paused");',
    ],
    "slippage": [
        'require(amountOut >= amountOutMin, "UniswapV2Router: INSUFFICIENT_OUTPUT_AMOUNT");',
        'require(amounts[0] <= amountInMax, "UniswapV2Router: EXCESSIVE_INPUT_AMOUNT");',
        'require(received >= minReceived, "slippage");',
        "if (outAmount < minOut) revert SlippageExceeded();",
        'require(amountA >= amountAMin, "UniswapV2Router: INSUFFICIENT_A_AMOUNT");',
    ],
    "reentrancy": [
        'require(_status != _ENTERED, "ReentrancyGuard: reentrant call");',
        'require(!locked, "LOCKED");',
        'require(unlocked == 1, "UniswapV2: LOCKED");',
        "if (reentrancyLock) revert Reentrancy();",
        'require(_notEntered, "reentered");',
    ],
    "supply": [
        'require(totalSupply() + quantity <= maxSupply, "exceeds max supply");',
        'require(minted[msg.sender] + amount <= maxPerWallet, "wallet limit");',
        "require(_totalMinted() + count <= MAX_TOKENS);",
        "if (supply + qty > collectionSize) revert SoldOut();",
        'require(totalSupply + mintAmount <= cap, "cap exceeded");',
    ],
    "payment": [
        'require(msg.value >= price * quantity, "insufficient funds");',
        'require(msg.value == mintPrice, "wrong value");',
        "require(msg.value >= cost * amount);",
        "if (msg.value < fee) revert InsufficientPayment();",
        'require(msg.value >= publicPrice * num, "Ether value sent is not correct");',
    ],
}

# Guards written over several lines; the failing line is the first one.
MULTILINE = {
    "slippage": [
        "require(",
        "    amountOut >= amountOutMin,",
        '    "multi-line: insufficient output"',
        ");",
    ],
    "owner": [
        "if (msg.sender != controller) {",
        '    revert("not controller");',
        "}",
    ],
}

VYPER = {
    "owner": 'assert msg.sender == self.owner, "vyper: not owner"',
    "deadline": 'assert block.timestamp <= deadline, "vyper: expired"',
    "balance": "assert self.balanceOf[msg.sender] >= _value",
}

CONTRACTS = 4
DIM = 16


def hex_word(rng, nbytes):
    return "0x" + "".join(f"{rng.randrange(256):02x}" for _ in range(nbytes))


def solidity_contract(name, guards):
    """Returns source text and {guard_key: line}."""
    lines = ["// SPDX-License-Identifier: MIT", "pragma solidity ^0.8.17;", "", f"contract {name} {{"]
    where = {}
    for i, (key, body) in enumerate(guards):
        lines.append(f"    function f{i}() external {{")
        lines.append("        uint256 marker = 1;")
        where[key] = len(lines) + 1
        lines.extend("        " + b for b in body)
        lines.append("    }")
        lines.append("")
    lines.append("}")
    return "\n".join(lines) + "\n", where


def vyper_contract(guards):
    lines = ["# @version ^0.3.7", "", "owner: public(address)", ""]
    where = {}
    for i, (key, body) in enumerate(guards):
        lines.append("@external")
        lines.append(f"def g{i}(deadline: uint256, _value: uint256):")
        where[key] = len(lines) + 1
        lines.append("    " + body)
        lines.append("    pass")
        lines.append("")
    return "\n".join(lines), where


def build_sources(root, rng):
    """Returns [(address, file, line, family)] for every guard placed."""
    guards = []
    for family, items in FAMILIES.items():
        for j, g in enumerate(items):
            guards.append(((family, j), family, [g]))
    for family, body in MULTILINE.items():
        guards.append(((family, "multi"), family, body))
    rng.shuffle(guards)

    placed = []
    per = math.ceil(len(guards) / CONTRACTS)
    for c in range(CONTRACTS):
        addr = hex_word(rng, 20)
        chunk = guards[c * per:(c + 1) * per]
        src, where = solidity_contract(f"Fixture{c}", [(k, body) for k, _, body in chunk])
        fname = f"contracts/Fixture{c}.sol"
        (root / addr / "contracts").mkdir(parents=True)
        (root / addr / fname).write_text(src)
        (root / addr / "meta.json").write_text(json.dumps({"language": "solidity", "files": [fname]}) + "\n")
        for key, family, _ in chunk:
            placed.append((addr, fname, where[key], family))

    addr = hex_word(rng, 20)
    src, where = vyper_contract(list(VYPER.items()))
    (root / addr).mkdir(parents=True)
    (root / addr / "Pool.vy").write_text(src)
    (root / addr / "meta.json").write_text(json.dumps({"language": "vyper", "files": ["Pool.vy"]}) + "\n")
    for family in VYPER:
        placed.append((addr, "Pool.vy", where[family], family))
    return placed


def record(rng, to, reason, message=None, invariant=None, file=None, function=None, contract=None):
    gas_limit = rng.randrange(60_000, 400_000)
    return {
        "hash": hex_word(rng, 32),
        "failure_reason": reason,
        "block_number": rng.randrange(15_000_000, 17_000_000),
        "from_address": hex_word(rng, 20),
        "to_address": to,
        "tx_input": "0x" + "".join(f"{rng.randrange(256):02x}" for _ in range(rng.choice([4, 36, 68]))),
        "gas": rng.randrange(21_000, gas_limit),
        "gas_price": rng.randrange(10**9, 10**11),
        "gas_limit": gas_limit,
        "value": str(rng.randrange(0, 10**20)),
        "tx_index": rng.randrange(0, 300),
        "failure_message": message,
        "failure_invariant": invariant,
        "failure_file": file,
        "failure_function": function,
        "failure_contract": contract,
        "timestamp": rng.randrange(1_650_000_000, 1_690_000_000),
    }


def build_corpus(placed, rng):
    records = []
    for addr, fname, line, _family in placed:
        for _ in range(rng.randrange(1, 7)):
            records.append(record(rng, addr, "execution reverted", "reverted", "guard", f"{fname}:{line}",
                                  "f", addr))
    some = placed[0][0]
    records.append(record(rng, some, "Out of gas"))
    records.append(record(rng, some, "Out of gas"))
    records.append(record(rng, some, "out of gas"))
    records.append(record(rng, some, "execution reverted", "Panic code 0x11"))
    records.append(record(rng, some, "execution reverted", "division by zero"))
    for _ in range(3):
        records.append(record(rng, hex_word(rng, 20), "execution reverted", "unknown"))
    addr, fname, _, _ = placed[1]
    records.append(record(rng, addr, "execution reverted", None, "guard", f"{fname}:1", "f", addr))
    rng.shuffle(records)
    return records


def write_vectors(path, invariants, family_of, rng, centers, spread):
    lines = [f"# synthetic family-centred vectors, spread {spread}", f"{len(invariants)} {DIM}"]
    for inv in invariants:
        fam = family_of(inv)
        v = [c + rng.gauss(0.0, spread) for c in centers[fam]]
        norm = math.sqrt(sum(x * x for x in v))
        lines.append(inv["id"] + " " + " ".join(f"{x / norm:.12f}" for x in v))
    path.write_text("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", default="build/revinv")
    ap.add_argument("--out", default="data/fixture")
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)

    placed = build_sources(out / "sources", rng)
    records = build_corpus(placed, rng)
    (out / "corpus.jsonl").write_text("".join(json.dumps(r) + "\n" for r in records))

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([args.cli, "extract", "--corpus", str(out / "corpus.jsonl"), "--sources",
                        str(out / "sources"), "--out", tmp], check=True)
        invariants = [json.loads(l) for l in Path(tmp, "invariants.jsonl").read_text().splitlines() if l]

    family_at = {(a.lower(), f, l): fam for a, f, l, fam in placed}

    def family_of(inv):
        p = inv["provenance"][0]
        return family_at[(p["contract"].lower(), p["file"], p["line"])]

    centers = {}
    for fam in FAMILIES:
        v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
        norm = math.sqrt(sum(x * x for x in v))
        centers[fam] = [x / norm for x in v]
    (out / "vectors").mkdir()
    write_vectors(out / "vectors" / "synthetic_predicate.vec", invariants, family_of, rng, centers, 0.08)
    write_vectors(out / "vectors" / "synthetic_message.vec", invariants, family_of, rng, centers, 0.10)
    (out / "families.json").write_text(
        json.dumps({inv["id"]: family_of(inv) for inv in invariants}, indent=1, sort_keys=True) + "\n")

    grid = {
        "seed": 7,
        "views": ["predicate"],
        "embeddings": [
            {"name": "tfidf"},
            {"name": "synthetic", "vectors": {"predicate": "vectors/synthetic_predicate.vec",
                                               "message": "vectors/synthetic_message.vec"}},
        ],
        "kmeans": {"k": [8, 12]},
        "dbscan": {"eps": [0.1, 0.5], "eps_step": 0.1, "min_samples": [2, 3]},
        "hdbscan": {"eps": [0.1, 0.3], "eps_step": 0.1, "min_cluster_size": [2, 3]},
    }
    (out / "grid.json").write_text(json.dumps(grid, indent=2) + "\n")
    print(f"{len(records)} records, {len(invariants)} invariants")


if __name__ == "__main__":
    main()
