#!/usr/bin/env python3
"""
Demo script walking a match report through the newsbot API
"""
import json
import os

import requests

BASE_URL = "http://localhost:8000"
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

EVENTS = [
    "23',Score,迪达克,西班牙人",
    "35',Yellow Card,穆巴拉克,阿拉维斯",
]


def print_section(title: str):
    """Print a formatted section header"""
    print("\n" + "=" * 60)
    print(f"  {title}")
    print("=" * 60 + "\n")


def print_response(response: requests.Response, title: str = "Response"):
    """Print formatted response"""
    print(f"{title}:")
    try:
        data = response.json()
        print(json.dumps(data, indent=2, ensure_ascii=False))
    except ValueError:
        print(response.text)
    print(f"Status Code: {response.status_code}\n")


def main():
    print("⚽ Newsbot Robot Reporter - Demo")
    print("=" * 60)

    # Check if server is running
    try:
        response = requests.get(f"{BASE_URL}/")
        print("✓ Server is running")
        print_response(response, "Welcome Message")
    except requests.exceptions.ConnectionError:
        print("❌ Error: Server is not running. Please start the server first:")
        print("   ./start.sh")
        return

    print_section("1. Generating a Match Report")
    response = requests.post(f"{BASE_URL}/news/generate", json={
        "events": EVENTS,
        "home": "西班牙人",
        "away": "阿拉维斯",
        "seed": 42,
    })
    article = response.json()["article"]
    for sentence in article["sentences"]:
        print(f"  [{sentence['section']}] {sentence['text']}")

    print_section("2. Summarizing the Report")
    response = requests.post(f"{BASE_URL}/news/summarize", json={
        "article": article,
        "events": EVENTS,
        "budget": 1,
    })
    summary = response.json()["summary"]
    for sentence in summary["sentences"]:
        print(f"  {sentence['text']}")

    print_section("3. Translating the Summary")
    for sentence in summary["sentences"]:
        response = requests.post(f"{BASE_URL}/news/translate", json={"text": sentence["text"]})
        data = response.json()
        print(f"  {sentence['text']}")
        print(f"    masked:     {data['masked']}")
        print(f"    translated: {data['translation']}")

    print_section("4. Running the Full Pipeline")
    response = requests.post(f"{BASE_URL}/pipeline/run", json={
        "config_path": os.path.join(DATA_DIR, "pipeline.env"),
        "overrides": {"run_id": "demo"},
    })
    if response.status_code != 200:
        print_response(response, "Pipeline Error")
        return
    data = response.json()
    print(f"Run written to {data['run_dir']}")
    for sentence in data["summary"]:
        print(f"  {sentence}")
    print(f"{data['frame_count']} animation frames")
    print(f"Config hash: {data['manifest']['config_sha256']}")

    print_section("Demo Complete!")
    print("✅ All features demonstrated successfully!")
    print("\n💡 Tip: Visit http://localhost:8000/docs for interactive API documentation")


if __name__ == "__main__":
    main()
