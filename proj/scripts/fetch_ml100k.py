#!/usr/bin/env python3
"""Extract MovieLens-100K from the RecBole wheel into the TSV layout read by `diffgt ingest`.

Writes <out>/ratings.tsv, <out>/item_side.tsv (genres) and <out>/user_side.tsv
(age bucket, gender, occupation). Usage: fetch_ml100k.py [out_dir]
"""
import pathlib
import subprocess
import sys
import tempfile
import zipfile

PREFIX = "recbole/dataset_example/ml-100k/ml-100k."


def rows(blob):
    lines = blob.decode("latin-1").splitlines()
    return [line.split("\t") for line in lines[1:] if line.strip()]


def age_bucket(age):
    age = int(age)
    for bound in (18, 25, 35, 45, 50, 56):
        if age < bound:
            return f"age<{bound}"
    return "age56+"


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/ml-100k")
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                        "recbole==1.2.1", "-d", tmp], check=True)
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            inter = rows(z.read(PREFIX + "inter"))
            items = rows(z.read(PREFIX + "item"))
            users = rows(z.read(PREFIX + "user"))
    with open(out / "ratings.tsv", "w") as f:
        for user, item, rating, ts in inter:
            f.write(f"{user}\t{item}\t{rating}\t{ts}\n")
    with open(out / "item_side.tsv", "w") as f:
        for item, _title, _year, genres in items:
            f.write(f"{item}\t{'|'.join(genres.split())}\n")
    with open(out / "user_side.tsv", "w") as f:
        for user, age, gender, occupation, _zip in users:
            f.write(f"{user}\t{age_bucket(age)}|{gender}|{occupation}\n")
    print(f"wrote {len(inter)} interactions, {len(items)} items, {len(users)} users to {out}")


if __name__ == "__main__":
    main()
