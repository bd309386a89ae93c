if __name__ == "__main__":
    from npmc.run import main
    main()
