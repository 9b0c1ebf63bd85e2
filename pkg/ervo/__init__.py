# ervo: Er:YVO4 spin and optical toolkit
