"""Print the verdict reports for the three named fixtures as JSON."""

from symdiff3.cli import main

FIXTURES = {
    "C": ["--a", "1 + z*w - 0.5*w^2", "--b", "1 + 0.5*z^2 - z*w"],
    "W": ["--a=-(1+z*w)^2", "--b=-(1+z*w)"],
    "K": ["--a=-1", "--b=-1"],
}

if __name__ == "__main__":
    for name, argv in FIXTURES.items():
        print(f"# fixture {name}")
        main(["check", *argv])
