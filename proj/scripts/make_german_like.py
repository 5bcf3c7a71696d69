"""Generate a German-credit-shaped synthetic table (the original file is not shipped here).

Columns and category levels follow the UCI German credit layout; values are drawn from a
seeded generator so the file is reproducible. The label depends on a few features and,
weakly, on sex so that the fairness objectives are not all trivially zero.
"""
import argparse
import json
from pathlib import Path

import numpy as np


def generate(n: int, seed: int):
    rng = np.random.default_rng(seed)
    sex = np.where(rng.random(n) < 0.69, "male", "female")
    age = np.clip(rng.gamma(6.0, 6.0, n) + 19, 19, 75).round().astype(int)
    duration = np.clip(rng.gamma(2.5, 8.5, n), 4, 72).round().astype(int)
    amount = np.clip(rng.lognormal(7.8, 0.75, n), 250, 18500).round().astype(int)
    installment_rate = rng.integers(1, 5, n)
    existing_credits = rng.choice([1, 2, 3, 4], n, p=[0.63, 0.33, 0.03, 0.01])
    dependents = rng.choice([1, 2], n, p=[0.85, 0.15])
    status = rng.choice(["A11", "A12", "A13", "A14"], n, p=[0.27, 0.27, 0.06, 0.40])
    history = rng.choice(["A30", "A31", "A32", "A33", "A34"], n, p=[0.04, 0.05, 0.53, 0.09, 0.29])
    purpose = rng.choice(["A40", "A41", "A42", "A43", "A46", "A49"], n, p=[0.23, 0.10, 0.18, 0.28, 0.05, 0.16])
    savings = rng.choice(["A61", "A62", "A63", "A64", "A65"], n, p=[0.60, 0.10, 0.06, 0.05, 0.19])
    employment = rng.choice(["A71", "A72", "A73", "A74", "A75"], n, p=[0.06, 0.17, 0.34, 0.17, 0.26])
    housing = rng.choice(["A151", "A152", "A153"], n, p=[0.18, 0.71, 0.11])
    job = rng.choice(["A171", "A172", "A173", "A174"], n, p=[0.02, 0.20, 0.63, 0.15])
    foreign = rng.choice(["A201", "A202"], n, p=[0.96, 0.04])

    logit = (
        0.05
        + 1.2 * (status == "A14")
        - 0.6 * (status == "A11")
        + 0.7 * (history == "A34")
        - 0.9 * np.isin(history, ["A30", "A31"])
        - 0.035 * (duration - 20)
        - 0.00006 * (amount - 3000)
        + 0.5 * (savings == "A65")
        + 0.015 * (age - 35)
        + 0.6 * (sex == "male")
        - 0.2 * (installment_rate - 2.5)
    )
    good = rng.random(n) < 1.0 / (1.0 + np.exp(-logit))
    credit = np.where(good, "good", "bad")
    # a few missing numeric cells exercise the imputation path
    age_text = age.astype(str).astype(object)
    age_text[rng.random(n) < 0.01] = ""
    return {
        "status": status,
        "duration": duration,
        "credit_history": history,
        "purpose": purpose,
        "credit_amount": amount,
        "savings": savings,
        "employment": employment,
        "installment_rate": installment_rate,
        "sex": sex,
        "age": age_text,
        "housing": housing,
        "existing_credits": existing_credits,
        "job": job,
        "num_dependents": dependents,
        "foreign_worker": foreign,
        "credit": credit,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()

    cols = generate(args.rows, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    names = list(cols)
    with open(args.out / "german_like.csv", "w", newline="\n") as f:
        f.write(",".join(names) + "\n")
        for i in range(args.rows):
            f.write(",".join(str(cols[c][i]) for c in names) + "\n")

    numeric = {"duration", "credit_amount", "installment_rate", "age", "existing_credits", "num_dependents"}
    roles = {}
    for c in names:
        if c == "sex":
            roles[c] = "sensitive"
        elif c == "credit":
            roles[c] = "label"
        else:
            roles[c] = "numeric" if c in numeric else "categorical"
    schema = {"columns": roles, "positive_label": "good", "privileged": "male"}
    (args.out / "german_like.schema.json").write_text(json.dumps(schema, indent=2) + "\n")


if __name__ == "__main__":
    main()
