#!/usr/bin/env python3
"""Regenerates the scripted-backend fixtures under fixtures/.

The eval replies are built from lexicon terms so their scores can be worked
out by hand; the script prints them as a sanity check.
"""
import json
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"
IDEOLOGY = "Urban Cycling"
BASE = "gpt-3.5-turbo"
CHAMPION = "ft:mock"
CHALLENGER = "ft:mock-challenger"

lexicon = {}
for line in (ROOT / "data/lexicon/default.tsv").read_text().splitlines():
    if not line or line.startswith("#"):
        continue
    term, w, s = line.split("\t")
    lexicon[term] = int(w) * float(s)


def score(text):
    hits = [lexicon[t] for t in re.findall(r"[a-z0-9]+", text.lower()) if t in lexicon]
    return sum(hits) / len(hits) if hits else 0.0


PROBES = [
    "What is your view on commuting by bicycle in large cities?",
    "How would you describe weekend rides along river paths?",
    "What do you think of painted lanes on busy avenues?",
    "How do residents feel about bike share stations near schools?",
    "What is your opinion of cargo bikes for small deliveries?",
    "How would you assess cycling to the office in winter?",
    "What do you make of car-free Sundays downtown?",
    "How do you see the role of bicycles in public transit trips?",
    "What are your thoughts on bicycle helmets for adult riders?",
    "How would you rate bike parking at train stations?",
    "What is your take on electric bicycles for older riders?",
    "How do shop owners regard cyclists on their street?",
    "What do you think about group rides organized by neighbors?",
    "How would you characterize traffic calming near parks?",
    "What is your impression of children biking to class?",
    "How do you evaluate city budgets spent on cycle tracks?",
    "What is your sense of bike tourism in historic districts?",
    "How would you judge night riding with proper lights?",
    "What do you believe about replacing short car trips with bikes?",
    "How do commuters describe mixed traffic on narrow lanes?",
]

POS = ["good", "great", "excellent", "wonderful", "pleasant", "healthy", "safe", "enjoyable",
       "helpful", "efficient", "vibrant", "thriving", "delightful", "inspiring", "convenient", "fun"]
NEG = ["bad", "poor", "terrible", "awful", "dangerous", "unsafe", "harmful", "polluted",
       "costly", "inconvenient", "annoying", "stressful", "miserable", "chaotic", "risky", "frustrating"]


def eval_replies(i):
    n = len(POS)
    champion = (f"Cycling here is {POS[i % n]} and {POS[(i + 5) % n]}, "
                f"and the results are {POS[(i + 11) % n]}.")
    challenger = (f"Cycling here is {NEG[i % n]} and {NEG[(i + 5) % n]}, "
                  f"and the results are {NEG[(i + 11) % n]}.")
    base = f"There are {POS[(i + 2) % n]} aspects and {NEG[(i + 7) % n]} aspects to consider."
    return base, champion, challenger


TREE_RULES = [
    {"match": f"classify the topic {IDEOLOGY} into",
     "content": "1. Infrastructure\n2. Health\n3. Environment"},
    {"match": "pertaining to Infrastructure with",
     "content": "1. Protected bike lanes | positive\n2. Bike parking | positive\n3. Pothole hazards | negative"},
    {"match": "pertaining to Health with",
     "content": "1. Cardio fitness | positive\n2. Air quality | negative\n3. Traffic injuries | negative"},
    {"match": "pertaining to Environment with",
     "content": "1. Air quality | positive\n2. Lower emissions | positive\n3. Car dependency | negative"},
    {"match": "pivotal entities or topics pertaining to",
     "content": "1. Community rides | positive\n2. Commuter savings | positive\n3. Road rage | negative"},
]

QA_LINES = [
    ("How does cycling shape daily life in the city?",
     "Riders often call it a healthy habit, and a local advocate says it turns errands into exercise."),
    ("Why do planners point to bikes when discussing congestion?",
     "Transport reports note that one lane of bikes moves many more people than one lane of cars."),
    ("What do regular riders say about their commute?",
     "Many describe it as the calmest part of the day, echoing a popular post from a city cyclist."),
    ("How do bikes connect neighbors to local shops?",
     "Shop owners interviewed in the news mention steady foot and bike traffic at their doors."),
    ("Which voices speak up for cycling in public debates?",
     "Mayors, doctors and community groups have all praised cycling in recent statements."),
]


def qa_rule():
    blocks = []
    for j, (q, a) in enumerate(QA_LINES, start=1):
        blocks.append(f"Q: [{{{{seed}}}}.{j}] {q}\nA: {a}")
    return {"match": "Could you synthesize", "content": "\n\n".join(blocks)}


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main():
    probes = "".join(f"p{i + 1:02d}\t{q}\n" for i, q in enumerate(PROBES))
    for a in PROBES:
        for b in PROBES:
            assert a == b or a not in b
    write(FIX / "mock/probes.tsv", "# Sentiment-neutral probes about city cycling.\n" + probes)

    rules = list(TREE_RULES) + [qa_rule()]
    print("probe  base    champ   chall")
    for i, q in enumerate(PROBES):
        base, champion, challenger = eval_replies(i)
        rules.append({"match": q, "model": BASE, "content": base})
        rules.append({"match": q, "model": CHAMPION, "content": champion})
        rules.append({"match": q, "model": CHALLENGER, "content": challenger})
        print(f"p{i + 1:02d}  {score(base):+.3f}  {score(champion):+.3f}  {score(challenger):+.3f}")
    write(FIX / "mock/script.json", json.dumps(rules, indent=2) + "\n")

    common = {
        "tree": {"categories": 3, "topics_per_expansion": 3, "max_depth": 3},
        "synth": {"K": 5, "target_size": 100, "rng_seed": 7},
        "eval": {"probe_file": "probes.tsv",
                 "models": {"base": BASE, "champion": CHAMPION, "challenger": CHALLENGER}},
        "pricing": {"training_per_1k_tokens": 0.008, "input_per_1k_tokens": 0.0015,
                    "output_per_1k_tokens": 0.002, "epochs": 3},
        "finetune": {"base_model": BASE},
    }
    mock = {"backend": {"mode": "scripted", "script_path": "script.json", "max_concurrency": 8}, **common}
    write(FIX / "mock/config.json", json.dumps(mock, indent=2) + "\n")

    # Monotone sweep: the champion id carries the dataset size and replies grow
    # more positive with it; the base model is neutral everywhere.
    sweep_replies = {
        100: "It is pleasant but sometimes noisy.",
        200: "It is good.",
        300: "It is healthy.",
        400: "It is great.",
        500: "It is excellent.",
    }
    sweep_rules = list(TREE_RULES) + [qa_rule()]
    for size, text in sweep_replies.items():
        sweep_rules.append({"match": "", "model": f"{CHAMPION}:n{size}", "content": text})
        print(f"n{size}: {score(text):+.3f}")
    sweep_rules.append({"match": "", "model": BASE, "content": "There are good aspects and bad aspects."})
    write(FIX / "sweep/script.json", json.dumps(sweep_rules, indent=2) + "\n")
    sweep = {"backend": {"mode": "scripted", "script_path": "script.json", "max_concurrency": 8},
             **common,
             "eval": {"probe_file": "../mock/probes.tsv", "models": {"base": BASE}},
             "sweep": {"sizes": [100, 200, 300, 400, 500], "side": "positive",
                       "champion_template": "{model}:n{size}"}}
    write(FIX / "sweep/config.json", json.dumps(sweep, indent=2) + "\n")


if __name__ == "__main__":
    main()
