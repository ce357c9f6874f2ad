#!/usr/bin/env python3
"""Regenerates the bundled benchmark dataset under data/bench/.

Layout per domain:  <domain>/domain.pddl, <domain>/pNN.pddl, <domain>/pNN.hyps
A .hyps file holds one candidate goal per line as comma-separated atoms.
"""
import argparse
import pathlib
import random

BLOCKS_DOMAIN = """(define (domain blocks-world)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block)
               (ontable ?x - block)
               (clear ?x - block)
               (handempty)
               (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
"""

LOGISTICS_DOMAIN = """(define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport location - place
          city place physobj - object)
  (:predicates (in-city ?loc - place ?city - city)
               (at ?obj - physobj ?loc - place)
               (in ?pkg - package ?veh - vehicle))
  (:action load-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?truck)))
  (:action load-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (at ?pkg ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?airplane)))
  (:action unload-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (not (in ?pkg ?truck)) (at ?pkg ?loc)))
  (:action unload-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (in ?pkg ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?pkg ?airplane)) (at ?pkg ?loc)))
  (:action drive-truck
    :parameters (?truck - truck ?loc-from - place ?loc-to - place ?city - city)
    :precondition (and (at ?truck ?loc-from) (in-city ?loc-from ?city) (in-city ?loc-to ?city))
    :effect (and (not (at ?truck ?loc-from)) (at ?truck ?loc-to)))
  (:action fly-airplane
    :parameters (?airplane - airplane ?loc-from - airport ?loc-to - airport)
    :precondition (at ?airplane ?loc-from)
    :effect (and (not (at ?airplane ?loc-from)) (at ?airplane ?loc-to))))
"""


def fmt(atoms):
    return ", ".join("(" + " ".join(a) + ")" for a in atoms)


def random_towers(rng, blocks):
    order = blocks[:]
    rng.shuffle(order)
    towers, cur = [], []
    for b in order:
        cur.append(b)
        if rng.random() < 0.4:
            towers.append(cur)
            cur = []
    if cur:
        towers.append(cur)
    return towers


def blocks_instance(rng, idx):
    n = rng.choice([4, 5, 5, 6])
    blocks = [chr(ord("a") + i) for i in range(n)]
    init = [("handempty",)]
    for t in random_towers(rng, blocks):
        init.append(("ontable", t[0]))
        for below, above in zip(t, t[1:]):
            init.append(("on", above, below))
        init.append(("clear", t[-1]))
    pool = []
    seen = set()
    while len(pool) < 6:
        goal = []
        for t in random_towers(rng, blocks):
            for below, above in zip(t, t[1:]):
                goal.append(("on", above, below))
        key = tuple(sorted(goal))
        init_on = {a for a in init if a[0] == "on"}
        if not goal or key in seen or set(goal) <= init_on:
            continue
        seen.add(key)
        pool.append(goal)
    objects = " ".join(blocks) + " - block"
    problem = "(define (problem blocks-%02d)\n  (:domain blocks-world)\n  (:objects %s)\n  (:init\n%s)\n  (:goal (and %s)))\n" % (
        idx, objects, "\n".join("    (" + " ".join(a) + ")" for a in init),
        " ".join("(" + " ".join(a) + ")" for a in pool[0]))
    return problem, pool


def logistics_instance(rng, idx):
    cities = ["c1", "c2"]
    places = {"c1": ["apt1", "l1"], "c2": ["apt2", "l2"]}
    airports = ["apt1", "apt2"]
    locs = [p for c in cities for p in places[c]]
    npk = rng.choice([2, 2, 3])
    pkgs = ["p%d" % (i + 1) for i in range(npk)]
    init = []
    for c in cities:
        for p in places[c]:
            init.append(("in-city", p, c))
    init.append(("at", "t1", rng.choice(places["c1"])))
    init.append(("at", "t2", rng.choice(places["c2"])))
    init.append(("at", "a1", rng.choice(airports)))
    start = {}
    for p in pkgs:
        start[p] = rng.choice(locs)
        init.append(("at", p, start[p]))
    pool, seen = [], set()
    while len(pool) < 6:
        goal = tuple(sorted(("at", p, rng.choice(locs)) for p in pkgs))
        moved = sum(1 for (_, p, l) in goal if start[p] != l)
        if goal in seen or moved == 0:
            continue
        seen.add(goal)
        pool.append(list(goal))
    objects = "c1 c2 - city\n    apt1 apt2 - airport\n    l1 l2 - location\n    t1 t2 - truck\n    a1 - airplane\n    %s - package" % " ".join(pkgs)
    problem = "(define (problem logistics-%02d)\n  (:domain logistics)\n  (:objects %s)\n  (:init\n%s)\n  (:goal (and %s)))\n" % (
        idx, objects, "\n".join("    (" + " ".join(a) + ")" for a in init),
        " ".join("(" + " ".join(a) + ")" for a in pool[0]))
    return problem, pool


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "bench"))
    ap.add_argument("--instances", type=int, default=12)
    ap.add_argument("--seed", type=int, default=2021)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    for name, domain, make in [("blocks-world", BLOCKS_DOMAIN, blocks_instance),
                               ("logistics", LOGISTICS_DOMAIN, logistics_instance)]:
        rng = random.Random("%s-%d" % (name, args.seed))
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        (d / "domain.pddl").write_text(domain)
        for i in range(1, args.instances + 1):
            problem, pool = make(rng, i)
            (d / ("p%02d.pddl" % i)).write_text(problem)
            (d / ("p%02d.hyps" % i)).write_text("".join(fmt(g) + "\n" for g in pool))


if __name__ == "__main__":
    main()
